#include "esp/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>

#include "esp/errors.hpp"
#include "esp/special_fn.hpp"

namespace esp {

namespace {

// ---------------------------------------------------------------------------
// Union-find with path halving.
// ---------------------------------------------------------------------------

struct DisjointSets {
  std::vector<int> parent;

  explicit DisjointSets(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }

  int count_roots() {
    int n = 0;
    for (int i = 0; i < static_cast<int>(parent.size()); ++i) {
      if (find(i) == i) ++n;
    }
    return n;
  }
};

// ---------------------------------------------------------------------------
// Raster counter internals.
// ---------------------------------------------------------------------------

// Sign classes: 1 where u > 0 after the tie shift, else 0.  Exact zeros are
// pushed into the positive class by a shift of 1e-13 * max|u| so that a
// measure-zero sampled nodal line does not spawn its own component.
std::vector<unsigned char> sign_classes(const ModeGrid& grid) {
  double umax = 0.0;
  for (double v : grid.values) umax = std::max(umax, std::abs(v));
  const double eta = 1e-13 * umax;
  std::vector<unsigned char> s(grid.values.size());
  for (size_t i = 0; i < grid.values.size(); ++i) {
    const double v = grid.values[i];
    s[i] = ((v == 0.0 ? eta : v) > 0.0) ? 1 : 0;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Analytic counter internals.
//
// Coordinates: on the unit sphere set p = X^2 - Y^2 and q = Z^2.  One open
// octant maps bijectively onto the interior of the triangle
//     T = conv{(-1, 0), (1, 0), (0, 1)},
// whose edges are the coordinate great circles:
//     E_X (X = 0):  p - q + 1 = 0,
//     E_Y (Y = 0):  p + q - 1 = 0,
//     E_Z (Z = 0):  q = 0.
// ---------------------------------------------------------------------------

struct Pt {
  double p;
  double q;
};

// Affine line np*p + nq*q + c = 0, stored with hypot(np, nq) = 1 so that the
// residual of a point against the line is its geometric distance.
struct Line {
  double np;
  double nq;
  double c;
};

using Polygon = std::vector<Pt>;

// Keep the part of `poly` with f(x) = np*p + nq*q + c >= 0
// (Sutherland-Hodgman step).
Polygon clip_half_plane(const Polygon& poly, double np, double nq, double c) {
  Polygon out;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % n];
    const double fa = np * a.p + nq * a.q + c;
    const double fb = np * b.p + nq * b.q + c;
    if (fa >= 0.0) out.push_back(a);
    if ((fa > 0.0 && fb < 0.0) || (fa < 0.0 && fb > 0.0)) {
      const double s = fa / (fa - fb);
      out.push_back(Pt{a.p + s * (b.p - a.p), a.q + s * (b.q - a.q)});
    }
  }
  return out;
}

double polygon_area(const Polygon& poly) {
  double twice = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % n];
    twice += a.p * b.q - b.p * a.q;
  }
  return 0.5 * std::abs(twice);
}

// Total length of polygon boundary lying on the (normalized) line.
double contact_length(const Polygon& poly, const Line& edge) {
  double len = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % n];
    const double fa = edge.np * a.p + edge.nq * a.q + edge.c;
    const double fb = edge.np * b.p + edge.nq * b.q + edge.c;
    if (std::abs(fa) <= 1e-9 && std::abs(fb) <= 1e-9) {
      len += std::hypot(b.p - a.p, b.q - a.q);
    }
  }
  return len;
}

// Eigen-decomposition of a symmetric 2x2 matrix [[a, b], [b, c]]; mu1 >= mu2,
// v1/v2 unit eigenvectors.
void eig_sym2(double a, double b, double c, double& mu1, double& mu2,
              std::array<double, 2>& v1, std::array<double, 2>& v2) {
  const double half_tr = 0.5 * (a + c);
  const double disc = std::hypot(0.5 * (a - c), b);
  mu1 = half_tr + disc;
  mu2 = half_tr - disc;
  // Eigenvector for mu1: rows of (M - mu1 I) annihilate it; pick the larger
  // of the two candidate constructions for stability.
  const std::array<double, 2> cand1 = {b, mu1 - a};
  const std::array<double, 2> cand2 = {mu1 - c, b};
  const double n1 = std::hypot(cand1[0], cand1[1]);
  const double n2 = std::hypot(cand2[0], cand2[1]);
  if (std::max(n1, n2) < 1e-300) {
    v1 = {1.0, 0.0};  // multiple of identity
  } else if (n1 >= n2) {
    v1 = {cand1[0] / n1, cand1[1] / n1};
  } else {
    v1 = {cand2[0] / n2, cand2[1] / n2};
  }
  v2 = {-v1[1], v1[0]};
}

// Solve a small dense system by Gaussian elimination with partial pivoting.
std::vector<double> solve_small(int n, std::vector<double> a,
                                std::vector<double> b) {
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    }
    if (std::abs(a[piv * n + k]) < 1e-14) {
      throw numerical_error("exact_nodal_count: singular fit system");
    }
    if (piv != k) {
      for (int j = k; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      for (int j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  return x;
}

// Monomials 1, p, q, p^2, p*q, q^2 truncated to total degree dg.
int monomial_count(int dg) { return (dg + 1) * (dg + 2) / 2; }

void monomial_row(int dg, double p, double q, double* row) {
  int k = 0;
  for (int d = 0; d <= dg; ++d) {
    for (int ip = d; ip >= 0; --ip) {
      const int iq = d - ip;
      row[k++] = std::pow(p, ip) * std::pow(q, iq);
    }
  }
  (void)k;
}

// Fixed monomial order used below: index of p^i q^j.
// dg = 2 order: [1, p, q, p^2, pq, q^2]  ->  c00 c10 c01 c20 c11 c02.

struct BlockParity {
  int wx = 0;  // X | W
  int wy = 0;  // Y | W
  int wz = 0;  // Z | W
};

BlockParity block_parity(int l, const ModeCombination& modes) {
  BlockParity w;
  bool first = true;
  for (const auto& [mode, coeff] : modes) {
    if (mode.l != l) {
      throw domain_error("exact_nodal_count: all modes must share degree l");
    }
    const int wx =
        ((mode.family == Family::COS && mode.m % 2 == 1) ||
         (mode.family == Family::SIN && mode.m % 2 == 0))
            ? 1
            : 0;
    const int wy = (mode.family == Family::SIN) ? 1 : 0;
    const int wz = ((l - mode.m) % 2 == 1) ? 1 : 0;
    if (first) {
      w = BlockParity{wx, wy, wz};
      first = false;
    } else if (wx != w.wx || wy != w.wy || wz != w.wz) {
      throw domain_error(
          "exact_nodal_count: modes must belong to one symmetry block");
    }
  }
  if (first) throw domain_error("exact_nodal_count: empty mode combination");
  return w;
}

// Fit G = u / W on deterministic low-discrepancy samples in the open first
// octant.  The sample set is a Kronecker (R2) sequence; points too close to
// a coordinate plane are rejected so the division by W stays benign.
std::vector<double> fit_invariant_polynomial(int l, int dg,
                                             const ModeCombination& modes,
                                             const BlockParity& w) {
  const int nmono = monomial_count(dg);
  const int npts = std::max(8, 4 * nmono);
  constexpr double kA1 = 0.7548776662466927;  // plastic-number Kronecker pair
  constexpr double kA2 = 0.5698402909980532;

  std::vector<double> phi_rows(static_cast<size_t>(npts) * nmono);
  std::vector<double> gvals(npts);
  int accepted = 0;
  for (int n = 1; accepted < npts; ++n) {
    if (n > 100000) {
      throw numerical_error("exact_nodal_count: sample rejection stuck");
    }
    const double u1 = std::fmod(n * kA1, 1.0);
    const double u2 = std::fmod(n * kA2, 1.0);
    const double z = u1;
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = 0.5 * M_PI * u2;
    const double x = s * std::cos(th);
    const double y = s * std::sin(th);
    if (std::min({x, y, z}) < 0.15) continue;

    double u = 0.0;
    for (const auto& [mode, coeff] : modes) {
      if (std::abs(coeff) < 1e-15) continue;
      const double pl = legendre_p_normalized(LegendreMode{mode.l, mode.m}, z);
      const double ang = (mode.family == Family::COS)
                             ? std::cos(mode.m * th)
                             : std::sin(mode.m * th);
      u += coeff * pl * ang;
    }
    const double wval = (w.wx ? x : 1.0) * (w.wy ? y : 1.0) * (w.wz ? z : 1.0);
    const double p = x * x - y * y;
    const double q = z * z;
    monomial_row(dg, p, q, &phi_rows[static_cast<size_t>(accepted) * nmono]);
    gvals[accepted] = u / wval;
    ++accepted;
  }

  double gscale = 0.0;
  for (double g : gvals) gscale = std::max(gscale, std::abs(g));
  if (gscale == 0.0) {
    throw domain_error("exact_nodal_count: mode combination is zero");
  }

  // Normal equations; nmono <= 6 so a dense solve is plenty.
  std::vector<double> ata(static_cast<size_t>(nmono) * nmono, 0.0);
  std::vector<double> atb(nmono, 0.0);
  for (int r = 0; r < npts; ++r) {
    const double* row = &phi_rows[static_cast<size_t>(r) * nmono];
    for (int i = 0; i < nmono; ++i) {
      for (int j = 0; j < nmono; ++j) ata[i * nmono + j] += row[i] * row[j];
      atb[i] += row[i] * gvals[r];
    }
  }
  std::vector<double> coeff = solve_small(nmono, ata, atb);

  double resid = 0.0;
  for (int r = 0; r < npts; ++r) {
    const double* row = &phi_rows[static_cast<size_t>(r) * nmono];
    double fit = 0.0;
    for (int i = 0; i < nmono; ++i) fit += row[i] * coeff[i];
    resid = std::max(resid, std::abs(fit - gvals[r]));
  }
  if (resid > 1e-8 * gscale) {
    throw numerical_error(
        "exact_nodal_count: eigenfunction is not of the expected algebraic "
        "form (fit residual " +
        std::to_string(resid / gscale) + ")");
  }

  double cmax = 0.0;
  for (double c : coeff) cmax = std::max(cmax, std::abs(c));
  for (double& c : coeff) c /= cmax;
  return coeff;
}

// Split G into affine lines in (p, q).  Coefficients are normalized to unit
// max magnitude on entry.  dg = 2 must describe a degenerate conic: a real
// crossing pair or a real parallel pair; anything else is an error because a
// first-order eigenfunction factors through the confocal pencil.
std::vector<Line> lines_from_invariants(int dg,
                                        const std::vector<double>& c) {
  std::vector<Line> lines;
  auto push_line = [&lines](double np, double nq, double cc) {
    const double s = std::hypot(np, nq);
    if (s < 1e-10) {
      throw numerical_error("exact_nodal_count: degenerate nodal line");
    }
    lines.push_back(Line{np / s, nq / s, cc / s});
  };

  if (dg == 0) return lines;
  if (dg == 1) {
    push_line(c[1], c[2], c[0]);
    return lines;
  }

  const double c00 = c[0], c10 = c[1], c01 = c[2];
  const double c20 = c[3], c11 = c[4], c02 = c[5];

  // Homogeneous conic matrix in (p, q, 1).
  const double det3 =
      c20 * (c02 * c00 - 0.25 * c01 * c01) -
      0.5 * c11 * (0.5 * c11 * c00 - 0.25 * c01 * c10) +
      0.5 * c10 * (0.25 * c11 * c01 - 0.5 * c02 * c10);
  if (std::abs(det3) > 1e-9) {
    throw numerical_error(
        "exact_nodal_count: nodal conic does not factor into lines");
  }

  const double det2 = c20 * c02 - 0.25 * c11 * c11;
  double mu1, mu2;
  std::array<double, 2> v1, v2;
  eig_sym2(c20, 0.5 * c11, c02, mu1, mu2, v1, v2);

  if (std::abs(det2) <= 1e-9) {
    // Rank-1 quadratic part: parallel line pair n.x = u with
    // G = mu (n.x)^2 + b (n.x) + c00.
    const bool first = std::abs(mu1) >= std::abs(mu2);
    const double mu = first ? mu1 : mu2;
    const std::array<double, 2>& nrm = first ? v1 : v2;
    const std::array<double, 2> nul = {-nrm[1], nrm[0]};
    if (std::abs(c10 * nul[0] + c01 * nul[1]) > 1e-8) {
      throw numerical_error(
          "exact_nodal_count: parabolic nodal conic cannot arise from the "
          "confocal pencil");
    }
    const double b = c10 * nrm[0] + c01 * nrm[1];
    double disc = b * b - 4.0 * mu * c00;
    if (disc < -1e-12) {
      throw numerical_error(
          "exact_nodal_count: nodal conic has no real factorization");
    }
    disc = std::sqrt(std::max(0.0, disc));
    const double r1 = (-b + disc) / (2.0 * mu);
    const double r2 = (-b - disc) / (2.0 * mu);
    push_line(nrm[0], nrm[1], -r1);
    push_line(nrm[0], nrm[1], -r2);
    return lines;
  }

  if (det2 > 0.0) {
    throw numerical_error(
        "exact_nodal_count: elliptic nodal conic cannot arise from the "
        "confocal pencil");
  }

  // Indefinite quadratic part: crossing pair through the conic center.
  const double bx = 0.5 * c10, by = 0.5 * c01;
  const double cx = (-bx * c02 + by * 0.5 * c11) / det2;
  const double cy = (-by * c20 + bx * 0.5 * c11) / det2;
  const double at_center = c00 + c10 * cx + c01 * cy + c20 * cx * cx +
                           c11 * cx * cy + c02 * cy * cy;
  if (std::abs(at_center) > 1e-6) {
    throw numerical_error(
        "exact_nodal_count: crossing-pair factorization is inconsistent");
  }
  const double s1 = std::sqrt(mu1), s2 = std::sqrt(-mu2);
  for (int sign = -1; sign <= 1; sign += 2) {
    const double np = s1 * v1[0] + sign * s2 * v2[0];
    const double nq = s1 * v1[1] + sign * s2 * v2[1];
    push_line(np, nq, -(np * cx + nq * cy));
  }
  return lines;
}

// A line of the confocal pencil satisfies, after homogenizing the constant
// with X^2 + Y^2 + Z^2, quadric coefficients proportional to
// (1/(lam - alpha), 1/(lam - beta), 1/(lam - gamma)) for a separation
// constant lam strictly between the extreme parameters.  Returns lam.
double pencil_separation_constant(const Line& line, double alpha, double beta,
                                  double gamma) {
  const double qx = line.np + line.c;
  const double qy = line.c - line.np;
  const double qz = line.nq + line.c;
  const double scale = std::max({std::abs(qx), std::abs(qy), std::abs(qz)});
  if (std::min({std::abs(qx), std::abs(qy), std::abs(qz)}) < 1e-9 * scale) {
    throw numerical_error(
        "exact_nodal_count: nodal line degenerates to a coordinate plane");
  }
  const double diff = 1.0 / qx - 1.0 / qy;
  if (std::abs(diff) < 1e-14) {
    throw numerical_error(
        "exact_nodal_count: nodal line is not in the confocal pencil");
  }
  const double k = (beta - alpha) / diff;
  const double lam = alpha + k / qx;
  const double emin = std::min({alpha, beta, gamma});
  const double emax = std::max({alpha, beta, gamma});
  const double emid = alpha + beta + gamma - emin - emax;
  const double spread = emax - emin;
  if (std::abs(lam - gamma) < 1e-12 * spread) {
    throw numerical_error("exact_nodal_count: separation constant collides "
                          "with a perturbation parameter");
  }
  const double resid = std::abs(qz - k / (lam - gamma));
  if (resid > 1e-6 * scale) {
    throw numerical_error(
        "exact_nodal_count: nodal line fails the confocal pencil residual");
  }
  if (!(lam > emin && lam < emax)) {
    throw numerical_error(
        "exact_nodal_count: separation constant escapes the parameter range");
  }
  if (std::abs(lam - emid) < 1e-9 * spread) {
    throw numerical_error(
        "exact_nodal_count: separation constant sits at the umbilic value");
  }
  return lam;
}

// Count domains by clipping the octant triangle against the nodal lines and
// gluing the sign regions of the eight octants across non-nodal coordinate
// planes.  w gives the coordinate planes contained in the nodal set.
int count_by_octant_gluing(const std::vector<Line>& lines,
                           const std::array<int, 3>& w) {
  const Polygon triangle = {{-1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const std::array<Line, 3> edges = {
      Line{inv_sqrt2, -inv_sqrt2, inv_sqrt2},   // E_X: p - q + 1 = 0
      Line{inv_sqrt2, inv_sqrt2, -inv_sqrt2},   // E_Y: p + q - 1 = 0
      Line{0.0, 1.0, 0.0},                      // E_Z: q = 0
  };

  const int nl = static_cast<int>(lines.size());
  std::vector<std::array<bool, 3>> touches;
  for (int mask = 0; mask < (1 << nl); ++mask) {
    Polygon poly = triangle;
    for (int k = 0; k < nl && !poly.empty(); ++k) {
      const double sgn = ((mask >> k) & 1) ? 1.0 : -1.0;
      poly = clip_half_plane(poly, sgn * lines[k].np, sgn * lines[k].nq,
                             sgn * lines[k].c);
    }
    if (poly.size() < 3 || polygon_area(poly) <= 1e-12) continue;
    std::array<bool, 3> tc;
    for (int e = 0; e < 3; ++e) tc[e] = contact_length(poly, edges[e]) > 1e-7;
    touches.push_back(tc);
  }

  const int nr = static_cast<int>(touches.size());
  DisjointSets dsu(8 * nr);
  for (int r = 0; r < nr; ++r) {
    for (int axis = 0; axis < 3; ++axis) {
      if (w[axis] != 0 || !touches[r][axis]) continue;
      for (int oct = 0; oct < 8; ++oct) {
        dsu.unite(oct * nr + r, (oct ^ (1 << axis)) * nr + r);
      }
    }
  }
  return dsu.count_roots();
}

// Closed-form count for a product of pencil lines: n1 lines with separation
// constant below the middle parameter, n2 above, on the (i, j) cell grid of
// the sphero-conal coordinate rectangle.  wmin/wmid/wmax say whether the
// coordinate plane of the smallest/middle/largest parameter is nodal.
int species_count(int n1, int n2, bool wmin, bool wmid, bool wmax) {
  int total = 0;
  for (int i = 0; i <= n1; ++i) {
    for (int j = 0; j <= n2; ++j) {
      int glued = 0;
      if (i == 0 && !wmin) ++glued;
      if ((i == n1 || j == 0) && !wmid) ++glued;
      if (j == n2 && !wmax) ++glued;
      total += 8 >> glued;
    }
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Raster counter.
// ---------------------------------------------------------------------------

ModeGrid eval_mode_function(const ModeCombination& modes, int n_phi,
                            int n_theta) {
  if (n_phi < 3 || n_theta < 4) {
    throw domain_error("eval_mode_function: need n_phi >= 3 and n_theta >= 4");
  }
  double cmax = 0.0;
  for (const auto& [mode, coeff] : modes) {
    (void)mode;
    cmax = std::max(cmax, std::abs(coeff));
  }
  if (modes.empty() || cmax < 1e-15) {
    throw domain_error("eval_mode_function: zero mode combination");
  }

  ModeGrid grid;
  grid.n_phi = n_phi;
  grid.n_theta = n_theta;
  grid.values.assign(static_cast<size_t>(n_phi) * n_theta, 0.0);

  std::vector<double> pl(n_phi), ang(n_theta);
  for (const auto& [mode, coeff] : modes) {
    if (std::abs(coeff) < 1e-15) continue;
    for (int i = 0; i < n_phi; ++i) {
      const double phi = M_PI * i / (n_phi - 1);
      pl[i] = legendre_p_normalized(LegendreMode{mode.l, mode.m},
                                    std::cos(phi));
    }
    for (int j = 0; j < n_theta; ++j) {
      const double th = 2.0 * M_PI * j / n_theta;
      ang[j] = (mode.family == Family::COS) ? std::cos(mode.m * th)
                                            : std::sin(mode.m * th);
    }
    for (int i = 0; i < n_phi; ++i) {
      double* row = &grid.values[static_cast<size_t>(i) * n_theta];
      const double ci = coeff * pl[i];
      for (int j = 0; j < n_theta; ++j) row[j] += ci * ang[j];
    }
  }
  return grid;
}

int count_nodal_domains(const ModeGrid& grid) {
  if (grid.n_phi < 2 || grid.n_theta < 2 ||
      grid.values.size() !=
          static_cast<size_t>(grid.n_phi) * grid.n_theta) {
    throw domain_error("count_nodal_domains: malformed grid");
  }
  const int np = grid.n_phi, nt = grid.n_theta;
  const std::vector<unsigned char> s = sign_classes(grid);

  DisjointSets dsu(np * nt);
  for (int i = 0; i < np; ++i) {
    const int base = i * nt;
    for (int j = 0; j < nt; ++j) {
      const int jr = (j + 1) % nt;  // theta seam wraps around
      if (s[base + j] == s[base + jr]) dsu.unite(base + j, base + jr);
      if (i + 1 < np && s[base + j] == s[base + nt + j]) {
        dsu.unite(base + j, base + nt + j);
      }
    }
  }
  // All cells of a pole row sample the same physical point; fuse the ones in
  // the same sign class (a mixed pole row is a raster artifact and is left
  // to the resolution check).
  for (int i : {0, np - 1}) {
    const int base = i * nt;
    for (int j = 1; j < nt; ++j) {
      if (s[base + j] == s[base]) dsu.unite(base + j, base);
    }
  }
  return dsu.count_roots();
}

CheckedCount count_nodal_domains_checked(const ModeCombination& modes,
                                         int n_phi, int n_theta) {
  CheckedCount out;
  out.coarse_count =
      count_nodal_domains(eval_mode_function(modes, n_phi, n_theta));
  out.count = count_nodal_domains(
      eval_mode_function(modes, 2 * n_phi - 1, 2 * n_theta));
  out.suspect = out.count != out.coarse_count;
  return out;
}

void write_sign_pgm(const ModeGrid& grid, const std::string& path) {
  const std::vector<unsigned char> s = sign_classes(grid);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) {
    throw numerical_error("write_sign_pgm: cannot open " + path);
  }
  std::fprintf(f, "P2\n%d %d\n255\n", grid.n_theta, grid.n_phi);
  for (int i = 0; i < grid.n_phi; ++i) {
    for (int j = 0; j < grid.n_theta; ++j) {
      std::fprintf(f, "%d%c", s[static_cast<size_t>(i) * grid.n_theta + j] ? 255 : 0,
                   j + 1 == grid.n_theta ? '\n' : ' ');
    }
  }
  if (std::fclose(f) != 0) {
    throw numerical_error("write_sign_pgm: write failed for " + path);
  }
}

// ---------------------------------------------------------------------------
// Analytic counter.
// ---------------------------------------------------------------------------

int exact_nodal_count(int l, const ModeCombination& modes, double alpha,
                      double beta, double gamma) {
  if (l < 0 || l > 5) {
    throw domain_error(
        "exact_nodal_count: analytic counting needs 0 <= l <= 5");
  }
  ModeCombination active;
  double cmax = 0.0;
  for (const auto& mc : modes) cmax = std::max(cmax, std::abs(mc.second));
  if (cmax == 0.0) {
    throw domain_error("exact_nodal_count: zero mode combination");
  }
  for (const auto& mc : modes) {
    if (std::abs(mc.second) > 1e-12 * cmax) active.push_back(mc);
  }

  const BlockParity w = block_parity(l, active);
  const int dg = (l - w.wx - w.wy - w.wz) / 2;
  const std::vector<double> coeff =
      fit_invariant_polynomial(l, dg, active, w);
  const std::vector<Line> lines = lines_from_invariants(dg, coeff);
  const std::array<int, 3> warr = {w.wx, w.wy, w.wz};
  const int count = count_by_octant_gluing(lines, warr);

  const double emin = std::min({alpha, beta, gamma});
  const double emax = std::max({alpha, beta, gamma});
  const double spread = emax - emin;
  const bool strict_triaxial =
      spread > 0.0 && std::min({std::abs(alpha - beta), std::abs(beta - gamma),
                                std::abs(alpha - gamma)}) > 1e-9 * spread;

  if (strict_triaxial) {
    const double emid = alpha + beta + gamma - emin - emax;
    int n1 = 0, n2 = 0;
    for (const Line& line : lines) {
      const double lam = pencil_separation_constant(line, alpha, beta, gamma);
      if (lam < emid) {
        ++n1;
      } else {
        ++n2;
      }
    }
    // Coordinate axes sorted by their perturbation parameter.
    const std::array<double, 3> params = {alpha, beta, gamma};
    const std::array<int, 3> wall = {w.wx, w.wy, w.wz};
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&params](int a, int b) { return params[a] < params[b]; });
    const int expected =
        species_count(n1, n2, wall[order[0]] != 0, wall[order[1]] != 0,
                      wall[order[2]] != 0);
    if (expected != count) {
      throw numerical_error(
          "exact_nodal_count: octant gluing (" + std::to_string(count) +
          ") disagrees with the species closed form (" +
          std::to_string(expected) + ")");
    }
  } else if (alpha == beta && alpha != gamma && active.size() == 1) {
    // z-distinguished pair, pure mode: latitude/meridian closed form.
    const int mt = active[0].first.m;
    const int expected = (mt == 0) ? l + 1 : (l + 1 - mt) * 2 * mt;
    if (expected != count) {
      throw numerical_error(
          "exact_nodal_count: octant gluing (" + std::to_string(count) +
          ") disagrees with the spheroidal closed form (" +
          std::to_string(expected) + ")");
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Conjectured sequences and the full per-level check.
// ---------------------------------------------------------------------------

namespace {

int base_count(int l, int m) { return (m == 0) ? l + 1 : (l + 1 - m) * 2 * m; }

}  // namespace

std::vector<int> conjecture_sequences(int l, ShapeCase shape) {
  if (l < 0) throw domain_error("conjecture_sequences: l must be >= 0");
  if (l == 0) return {1};
  std::vector<int> n(2 * l + 1);
  n[0] = base_count(l, 0);
  for (int m = 1; m <= l; ++m) {
    n[2 * m - 1] = base_count(l, m);
    n[2 * m] = base_count(l, m);
  }
  switch (shape) {
    case ShapeCase::OBLATE:
      return n;
    case ShapeCase::PROLATE:
      std::reverse(n.begin(), n.end());
      return n;
    case ShapeCase::TRIAXIAL:
      for (int m = 1; m <= l - 1; ++m) n[2 * m] -= 2 * (m - 1);
      n[2 * l] = l + 1;
      return n;
  }
  throw domain_error("conjecture_sequences: unknown shape case");
}

namespace {

struct LevelMode {
  double lambda1;
  int m_tilde;  // -1 when not a pure spheroidal mode
  ModeCombination modes;
};

// Effective perturbation direction of a spec: the stated (alpha, beta,
// gamma) when present, otherwise axis offsets a-1, b-1, c-1 (first-order
// eigenvectors only depend on this direction).
std::array<double, 3> perturbation_direction(const EllipsoidSpec& spec) {
  if (spec.has_perturbation) return {spec.alpha, spec.beta, spec.gamma};
  return {spec.a - 1.0, spec.b - 1.0, spec.c - 1.0};
}

}  // namespace

ConjectureReport check_conjecture(const EllipsoidSpec& spec, int l, int n_phi,
                                  int n_theta) {
  if (l < 0) throw domain_error("check_conjecture: l must be >= 0");
  const std::array<double, 3> dir = perturbation_direction(spec);
  const double da = dir[0], db = dir[1], dc = dir[2];
  if (da == db && db == dc) {
    throw domain_error(
        "check_conjecture: a sphere does not pin down first-order "
        "eigenfunctions");
  }

  ConjectureReport report;
  report.l = l;
  report.exact_available = l <= 5;

  const bool pair_ab = (da == db);
  const bool pair_ac = (da == dc);
  const bool pair_bc = (db == dc);
  const bool biaxial = pair_ab || pair_ac || pair_bc;

  std::vector<LevelMode> level;
  std::vector<int> conjectured(std::max(1, 2 * l + 1));
  double rep = 0.0, dist = 0.0;

  if (biaxial) {
    // Rotate the distinguished axis to z; nodal counts are rotation
    // invariant and the pure modes live in the rotated frame.
    if (pair_ab) {
      rep = da;
      dist = dc;
    } else if (pair_bc) {
      rep = db;
      dist = da;
    } else {
      rep = da;
      dist = db;
    }
    report.shape = (rep > dist) ? ShapeCase::OBLATE : ShapeCase::PROLATE;

    for (int mt = 0; mt <= l; ++mt) {
      LevelMode lm;
      lm.lambda1 = biaxial_lambda1(l, mt, rep, dist);
      lm.m_tilde = mt;
      lm.modes = {{ModeIndex{l, mt, Family::COS}, 1.0}};
      level.push_back(lm);
      if (mt > 0) {
        lm.modes = {{ModeIndex{l, mt, Family::SIN}, 1.0}};
        level.push_back(lm);
      }
    }
    std::stable_sort(level.begin(), level.end(),
                     [](const LevelMode& a, const LevelMode& b) {
                       return a.lambda1 < b.lambda1;
                     });

    // The conjectured sequence per rank, with the zonal/sectoral
    // orientation read off the closed form instead of assumed.
    report.zonal_first =
        l == 0 || biaxial_lambda1(l, 0, rep, dist) <
                      biaxial_lambda1(l, l, rep, dist);
    for (size_t r = 0; r < level.size(); ++r) {
      conjectured[r] = base_count(l, level[r].m_tilde);
    }
  } else {
    report.shape = ShapeCase::TRIAXIAL;
    const std::vector<PerturbedEigenvalue> spec1 =
        perturbed_spectrum(l, da, db, dc);
    for (const PerturbedEigenvalue& pe : spec1) {
      LevelMode lm;
      lm.lambda1 = pe.lambda1;
      lm.m_tilde = -1;
      lm.modes = pe.eigvec;
      level.push_back(lm);
    }
    conjectured = conjecture_sequences(l, ShapeCase::TRIAXIAL);
  }

  // Count every eigenfunction on the raster and, when available, exactly.
  const double exact_a = biaxial ? rep : da;
  const double exact_b = biaxial ? rep : db;
  const double exact_c = biaxial ? dist : dc;
  double l1max = 1.0;
  for (const LevelMode& lm : level) {
    l1max = std::max(l1max, std::abs(lm.lambda1));
  }

  report.rows.resize(level.size());
  for (size_t r = 0; r < level.size(); ++r) {
    ConjectureRow& row = report.rows[r];
    row.rank = static_cast<int>(r);
    row.lambda1 = level[r].lambda1;
    row.m_tilde = level[r].m_tilde;
    const CheckedCount cc =
        count_nodal_domains_checked(level[r].modes, n_phi, n_theta);
    row.grid_count = cc.count;
    row.grid_suspect = cc.suspect;
    row.exact_count =
        report.exact_available
            ? exact_nodal_count(l, level[r].modes, exact_a, exact_b, exact_c)
            : -1;
    row.conjectured = conjectured[r];
  }

  // Group ranks by equal lambda1 and compare counts as multisets inside
  // each cluster; a cluster's internal order is not physical.
  const double tol = 1e-9 * l1max;
  report.all_match = true;
  report.courant_ok = true;
  size_t begin = 0;
  while (begin < report.rows.size()) {
    size_t end = begin + 1;
    while (end < report.rows.size() &&
           report.rows[end].lambda1 - report.rows[begin].lambda1 <= tol) {
      ++end;
    }
    std::vector<int> got, want;
    for (size_t r = begin; r < end; ++r) {
      got.push_back(report.exact_available ? report.rows[r].exact_count
                                           : report.rows[r].grid_count);
      want.push_back(report.rows[r].conjectured);
    }
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    const bool cluster_match = (got == want);
    const int bound = l * l + static_cast<int>(end) - 1 + 1;
    for (size_t r = begin; r < end; ++r) {
      report.rows[r].match = cluster_match;
      report.rows[r].courant_bound = bound;
      const int authoritative = report.exact_available
                                    ? report.rows[r].exact_count
                                    : report.rows[r].grid_count;
      report.rows[r].courant_ok = authoritative <= bound;
      report.all_match = report.all_match && cluster_match;
      report.courant_ok = report.courant_ok && report.rows[r].courant_ok;
    }
    begin = end;
  }
  return report;
}

}  // namespace esp
