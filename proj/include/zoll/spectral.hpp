#pragma once

// Spherical-harmonic machinery on the canonical sphere: Gauss-Legendre x
// uniform-azimuth quadrature grid, forward/inverse discrete transforms,
// potential matrix elements, the quantum average as cluster block
// projection, Weinstein band invariants, and eigenvalue gap scans for
// P_eps(hbar) = hbar^2 l(l+1)/2 + eps^2 V.
//
// Potentials that depend on theta only keep m as a good quantum number; the
// AxisymmetricOperator path stores one block per azimuthal order and makes
// the large-basis evolution runs feasible.  It agrees entry-by-entry with
// the dense OperatorMatrix path.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "zoll/linalg.hpp"
#include "zoll/potential.hpp"
#include "zoll/quadrature.hpp"
#include "zoll/spherical.hpp"

namespace zoll {

struct HarmonicBasis {
  int lmax = 0;
  int ntheta = 0, nphi = 0;
  std::vector<double> nodes_c;   // Gauss-Legendre nodes in c = cos theta
  std::vector<double> weights;   // matching weights
  std::vector<double> phis;      // uniform azimuth nodes
  // theta-normalized Legendre table: theta_table[j * nm + col(l, m)] for m >= 0.
  std::vector<double> theta_table;

  static HarmonicBasis build(int lmax) {
    if (lmax < 1) throw std::invalid_argument("HarmonicBasis: lmax >= 1");
    HarmonicBasis b;
    b.lmax = lmax;
    b.ntheta = 2 * lmax + 2;
    b.nphi = 2 * lmax + 4;
    QuadratureRule q = gauss_legendre(b.ntheta);
    b.nodes_c = std::move(q.nodes);
    b.weights = std::move(q.weights);
    b.phis.resize(b.nphi);
    for (int a = 0; a < b.nphi; ++a) b.phis[a] = kTwoPi * a / b.nphi;
    const int nm = b.pair_count();
    b.theta_table.resize(static_cast<std::size_t>(b.ntheta) * nm);
    std::vector<double> col(lmax + 1);
    for (int j = 0; j < b.ntheta; ++j)
      for (int m = 0; m <= lmax; ++m) {
        legendre_column(lmax, m, b.nodes_c[j], col.data());
        for (int l = m; l <= lmax; ++l)
          b.theta_table[static_cast<std::size_t>(j) * nm + pair_index(lmax, l, m)] = col[l - m];
      }
    return b;
  }

  int size() const { return (lmax + 1) * (lmax + 1); }
  int flat_index(int l, int m) const { return l * l + l + m; }
  int pair_count() const { return (lmax + 1) * (lmax + 2) / 2; }
  static int pair_index(int lmax, int l, int m) {
    // m-major packing of {(l, m): 0 <= m <= l <= lmax}
    return m * (2 * lmax + 3 - m) / 2 + (l - m);
  }
  // Theta_{l m}(c_j) including the sign for negative m.
  double theta_at(int j, int l, int m) const {
    double v = theta_table[static_cast<std::size_t>(j) * pair_count() +
                           pair_index(lmax, l, std::abs(m))];
    if (m < 0 && (m % 2 != 0)) v = -v;
    return v;
  }
};

struct HarmonicState {
  std::vector<cplx> c;  // flat index l^2 + l + m

  double norm() const {
    double s = 0;
    for (const cplx& z : c) s += std::norm(z);
    return std::sqrt(s);
  }
  void normalize() {
    double n = norm();
    if (n == 0) throw std::domain_error("HarmonicState: zero state");
    for (cplx& z : c) z /= n;
  }
};

struct Grid {
  int ntheta = 0, nphi = 0;
  std::vector<cplx> v;  // row-major [j * nphi + a]

  cplx& at(int j, int a) { return v[static_cast<std::size_t>(j) * nphi + a]; }
  const cplx& at(int j, int a) const { return v[static_cast<std::size_t>(j) * nphi + a]; }
};

// u(theta_j, phi_a) = sum c_lm Theta_lm(c_j) e^{i m phi_a} / sqrt(2 pi)
inline Grid synthesize(const HarmonicBasis& b, const HarmonicState& s) {
  if (s.c.size() != static_cast<std::size_t>(b.size()))
    throw std::invalid_argument("synthesize: state size does not match basis");
  Grid g;
  g.ntheta = b.ntheta;
  g.nphi = b.nphi;
  g.v.assign(static_cast<std::size_t>(b.ntheta) * b.nphi, cplx{});
  std::vector<cplx> gm(b.ntheta);
  for (int m = -b.lmax; m <= b.lmax; ++m) {
    bool any = false;
    for (int j = 0; j < b.ntheta; ++j) {
      cplx acc = 0;
      for (int l = std::abs(m); l <= b.lmax; ++l) {
        const cplx& cc = s.c[b.flat_index(l, m)];
        if (cc != cplx{}) acc += cc * b.theta_at(j, l, m);
      }
      gm[j] = acc * kInvSqrt2Pi;
      if (acc != cplx{}) any = true;
    }
    if (!any) continue;
    for (int a = 0; a < b.nphi; ++a) {
      cplx em{std::cos(m * b.phis[a]), std::sin(m * b.phis[a])};
      for (int j = 0; j < b.ntheta; ++j) g.v[static_cast<std::size_t>(j) * b.nphi + a] += gm[j] * em;
    }
  }
  return g;
}

// c_lm = sum_j w_j Theta_lm(c_j) (dphi / sqrt(2 pi)) sum_a u(j, a) e^{-i m phi_a}
inline HarmonicState analyze(const HarmonicBasis& b, const Grid& g) {
  if (g.ntheta != b.ntheta || g.nphi != b.nphi)
    throw std::invalid_argument("analyze: grid does not match basis");
  HarmonicState s;
  s.c.assign(b.size(), cplx{});
  const double dphi = kTwoPi / b.nphi;
  std::vector<cplx> hm(b.ntheta);
  for (int m = -b.lmax; m <= b.lmax; ++m) {
    for (int j = 0; j < b.ntheta; ++j) {
      cplx acc = 0;
      for (int a = 0; a < b.nphi; ++a) {
        cplx em{std::cos(m * b.phis[a]), -std::sin(m * b.phis[a])};
        acc += g.v[static_cast<std::size_t>(j) * b.nphi + a] * em;
      }
      hm[j] = acc * (dphi * kInvSqrt2Pi);
    }
    for (int l = std::abs(m); l <= b.lmax; ++l) {
      // Kahan-compensated theta sum keeps the Gram defect at rounding level.
      cplx sum = 0, comp = 0;
      for (int j = 0; j < b.ntheta; ++j) {
        cplx term = b.weights[j] * b.theta_at(j, l, m) * hm[j] - comp;
        cplx t = sum + term;
        comp = (t - sum) - term;
        sum = t;
      }
      s.c[b.flat_index(l, m)] = sum;
    }
  }
  return s;
}

// Pointwise evaluation of the truncated series at an arbitrary chart point;
// work must hold lmax + 1 doubles.
inline cplx evaluate_state(const HarmonicBasis& b, const HarmonicState& s, double theta,
                           double phi, double* work) {
  double c = std::cos(theta);
  cplx acc = 0;
  for (int m = 0; m <= b.lmax; ++m) {
    legendre_column(b.lmax, m, c, work);
    cplx pos = 0, neg = 0;
    for (int l = m; l <= b.lmax; ++l) {
      pos += s.c[b.flat_index(l, m)] * work[l - m];
      if (m > 0) neg += s.c[b.flat_index(l, -m)] * (((m % 2) ? -1.0 : 1.0) * work[l - m]);
    }
    cplx em{std::cos(m * phi), std::sin(m * phi)};
    acc += pos * em;
    if (m > 0) acc += neg * std::conj(em);
  }
  return acc * kInvSqrt2Pi;
}

inline cplx evaluate_state(const HarmonicBasis& b, const HarmonicState& s, double theta,
                           double phi) {
  std::vector<double> work(b.lmax + 1);
  return evaluate_state(b, s, theta, phi, work.data());
}

struct OperatorMatrix {
  CMatrix m;
  bool hermitian = false;
};

namespace detail {

// Azimuthal Fourier data of V on a quadrature sized for exact Y' V Y
// integrals: vhat[k + kmax][j] with V = sum_k vhat_k(theta) e^{i k phi}.
struct PotentialFourier {
  int kmax = 0;
  std::vector<double> nodes_c, weights;
  std::vector<std::vector<cplx>> vhat;
};

inline PotentialFourier potential_fourier(int lmax, const Potential& v) {
  PotentialFourier pf;
  int deg = std::max(1, v.ambient_degree());
  pf.kmax = std::min(deg, 2 * lmax);
  int ntheta = lmax + 2 + (deg + 1) / 2;           // exact for degree 2 lmax + deg
  int nphi = 2 * lmax + deg + 2;                   // covers Fourier order 2 lmax + deg
  QuadratureRule q = gauss_legendre(ntheta);
  pf.nodes_c = std::move(q.nodes);
  pf.weights = std::move(q.weights);
  pf.vhat.assign(2 * pf.kmax + 1, std::vector<cplx>(ntheta));
  std::vector<double> row(nphi);
  for (int j = 0; j < ntheta; ++j) {
    double theta = std::acos(pf.nodes_c[j]);
    for (int a = 0; a < nphi; ++a) row[a] = v(theta, kTwoPi * a / nphi);
    for (int k = -pf.kmax; k <= pf.kmax; ++k) {
      cplx acc = 0;
      for (int a = 0; a < nphi; ++a) {
        double ang = k * kTwoPi * a / nphi;
        acc += row[a] * cplx{std::cos(ang), -std::sin(ang)};
      }
      pf.vhat[k + pf.kmax][j] = acc / static_cast<double>(nphi);
    }
  }
  return pf;
}

// <Y_{l'm'} | V | Y_{lm}> = sum_j w_j Theta_{l'm'} Theta_{lm} vhat_{m'-m}(c_j)
inline cplx matrix_entry(const PotentialFourier& pf, int lp, int mp, int l, int m) {
  int k = mp - m;
  if (std::abs(k) > pf.kmax) return {};
  const std::vector<cplx>& vk = pf.vhat[k + pf.kmax];
  cplx acc = 0;
  for (std::size_t j = 0; j < pf.nodes_c.size(); ++j)
    acc += pf.weights[j] * normalized_legendre(lp, mp, pf.nodes_c[j]) *
           normalized_legendre(l, m, pf.nodes_c[j]) * vk[j];
  return acc;
}

}  // namespace detail

// Dense potential matrix over the flat (l, m) basis.  Upper triangle is
// computed and mirrored, so the result is exactly Hermitian.
inline OperatorMatrix potential_matrix(const HarmonicBasis& b, const Potential& v) {
  detail::PotentialFourier pf = detail::potential_fourier(b.lmax, v);
  const int n = b.size();
  // Cache Legendre values on the pf grid.
  const int nj = static_cast<int>(pf.nodes_c.size());
  const int nm = (b.lmax + 1) * (b.lmax + 2) / 2;
  std::vector<double> table(static_cast<std::size_t>(nj) * nm);
  std::vector<double> col(b.lmax + 1);
  for (int j = 0; j < nj; ++j)
    for (int m = 0; m <= b.lmax; ++m) {
      legendre_column(b.lmax, m, pf.nodes_c[j], col.data());
      for (int l = m; l <= b.lmax; ++l)
        table[static_cast<std::size_t>(j) * nm + HarmonicBasis::pair_index(b.lmax, l, m)] =
            col[l - m];
    }
  auto theta_of = [&](int j, int l, int m) {
    double t = table[static_cast<std::size_t>(j) * nm +
                     HarmonicBasis::pair_index(b.lmax, l, std::abs(m))];
    if (m < 0 && (m % 2 != 0)) t = -t;
    return t;
  };
  OperatorMatrix out;
  out.m = CMatrix(n);
  out.hermitian = true;
  for (int lp = 0; lp <= b.lmax; ++lp)
    for (int mp = -lp; mp <= lp; ++mp) {
      int row = b.flat_index(lp, mp);
      for (int l = 0; l <= b.lmax; ++l)
        for (int m = -l; m <= l; ++m) {
          int colix = b.flat_index(l, m);
          if (colix < row) continue;
          int k = mp - m;
          if (std::abs(k) > pf.kmax) continue;
          const std::vector<cplx>& vk = pf.vhat[k + pf.kmax];
          cplx acc = 0;
          for (int j = 0; j < nj; ++j)
            acc += pf.weights[j] * theta_of(j, lp, mp) * theta_of(j, l, m) * vk[j];
          out.m(row, colix) = acc;
          if (colix != row) out.m(colix, row) = std::conj(acc);
        }
    }
  return out;
}

// Quantum average <B> on the canonical sphere: projection onto the cluster
// block diagonal (zeroes every entry with l' != l).
inline OperatorMatrix quantum_average(const HarmonicBasis& b, const OperatorMatrix& op) {
  OperatorMatrix out = op;
  for (int lp = 0; lp <= b.lmax; ++lp)
    for (int mp = -lp; mp <= lp; ++mp)
      for (int l = 0; l <= b.lmax; ++l)
        for (int m = -l; m <= l; ++m)
          if (l != lp) out.m(b.flat_index(lp, mp), b.flat_index(l, m)) = 0.0;
  return out;
}

inline OperatorMatrix quantum_average(const HarmonicBasis& b, const Potential& v) {
  return quantum_average(b, potential_matrix(b, v));
}

// Eigenvalues of the (2l+1) x (2l+1) cluster block of V, ascending.
inline std::vector<double> band_invariants(const HarmonicBasis& b, const Potential& v, int l) {
  if (l > b.lmax) throw std::invalid_argument("band_invariants: l <= lmax");
  detail::PotentialFourier pf = detail::potential_fourier(b.lmax, v);
  CMatrix block(2 * l + 1);
  for (int mp = -l; mp <= l; ++mp)
    for (int m = -l; m <= l; ++m) {
      if (m + l < mp + l) continue;
      cplx e = detail::matrix_entry(pf, l, mp, l, m);
      block(mp + l, m + l) = e;
      block(m + l, mp + l) = std::conj(e);
    }
  Eigensystem es = hermitian_eig(block);
  return es.values;
}

// P_eps(hbar) matrix: diagonal free part hbar^2 l(l+1)/2 plus eps^2 V.
inline OperatorMatrix hamiltonian_matrix(const HarmonicBasis& b, double hbar, double eps,
                                         const Potential& v) {
  if (!(hbar > 0) || !(eps >= 0)) throw std::invalid_argument("hamiltonian_matrix: hbar > 0, eps >= 0");
  OperatorMatrix out;
  if (eps > 0) {
    out = potential_matrix(b, v);
    const double e2 = eps * eps;
    for (int i = 0; i < b.size(); ++i)
      for (int j = 0; j < b.size(); ++j) out.m(i, j) *= e2;
  } else {
    out.m = CMatrix(b.size());
  }
  for (int l = 0; l <= b.lmax; ++l) {
    double free_e = 0.5 * hbar * hbar * l * (l + 1.0);
    for (int m = -l; m <= l; ++m) {
      int i = b.flat_index(l, m);
      out.m(i, i) += free_e;
    }
  }
  out.hermitian = true;
  return out;
}

// Hermitian eigendecomposition with residual verification
// ||H v - lambda v|| <= 1e-9 ||H|| per pair.
inline Eigensystem eig(const OperatorMatrix& h) {
  if (!h.hermitian) throw std::invalid_argument("eig: Hermitian tag required");
  Eigensystem es = hermitian_eig(h.m);
  const int n = h.m.size();
  double hnorm = h.m.frobenius();
  for (int j = 0; j < n; ++j) {
    std::vector<cplx> x(n);
    for (int i = 0; i < n; ++i) x[i] = es.vectors(i, j);
    std::vector<cplx> y = h.m.apply(x);
    double r = 0;
    for (int i = 0; i < n; ++i) r += std::norm(y[i] - es.values[j] * x[i]);
    if (std::sqrt(r) > 1e-9 * std::max(hnorm, 1e-30))
      throw eig_failure("eig: residual check failed");
  }
  return es;
}

inline constexpr double kNoGap = -1.0;

// Minimum distance between distinct eigenvalues inside the window; values
// closer than the degeneracy tolerance merge first.  Returns kNoGap when
// fewer than two distinct values remain.
inline double min_gap(const std::vector<double>& eigenvalues, double e0, double delta0,
                      double degeneracy_tol) {
  std::vector<double> in;
  for (double e : eigenvalues)
    if (e >= e0 - delta0 && e <= e0 + delta0) in.push_back(e);
  std::sort(in.begin(), in.end());
  std::vector<double> distinct;
  for (double e : in) {
    if (distinct.empty() || e - distinct.back() > degeneracy_tol)
      distinct.push_back(e);
  }
  if (distinct.size() < 2) return kNoGap;
  double gap = distinct[1] - distinct[0];
  for (std::size_t i = 2; i < distinct.size(); ++i)
    gap = std::min(gap, distinct[i] - distinct[i - 1]);
  return gap;
}

// Default degeneracy tolerance: 1e-12 ||H||.
inline double min_gap(const OperatorMatrix& h, double e0, double delta0,
                      double degeneracy_tol = -1.0) {
  if (degeneracy_tol < 0) degeneracy_tol = 1e-12 * h.m.frobenius();
  return min_gap(eig(h).values, e0, delta0, degeneracy_tol);
}

// ---- axisymmetric (theta-only) potential path: one block per m ----

struct AxisymmetricOperator {
  int lmax = 0;
  std::vector<CMatrix> blocks;  // index m + lmax, block dim lmax + 1 - |m|

  const CMatrix& block(int m) const { return blocks[m + lmax]; }
  CMatrix& block(int m) { return blocks[m + lmax]; }
  int block_dim(int m) const { return lmax + 1 - std::abs(m); }
  // Row r of block m corresponds to l = |m| + r.
};

inline AxisymmetricOperator potential_blocks(const HarmonicBasis& b, const Potential& v) {
  if (!v.axisymmetric())
    throw std::invalid_argument("potential_blocks: potential must not depend on phi");
  detail::PotentialFourier pf = detail::potential_fourier(b.lmax, v);
  const int nj = static_cast<int>(pf.nodes_c.size());
  AxisymmetricOperator op;
  op.lmax = b.lmax;
  op.blocks.resize(2 * b.lmax + 1);
  const std::vector<cplx>& v0 = pf.vhat[pf.kmax];  // k = 0 component
  std::vector<double> col((b.lmax + 1));
  for (int m = -b.lmax; m <= b.lmax; ++m) {
    int ma = std::abs(m);
    int dim = b.lmax + 1 - ma;
    CMatrix blk(dim);
    // Legendre columns for this |m| on the pf grid.
    std::vector<double> tab(static_cast<std::size_t>(nj) * dim);
    for (int j = 0; j < nj; ++j) {
      legendre_column(b.lmax, ma, pf.nodes_c[j], col.data());
      for (int r = 0; r < dim; ++r) tab[static_cast<std::size_t>(j) * dim + r] = col[r];
    }
    for (int rp = 0; rp < dim; ++rp)
      for (int r = rp; r < dim; ++r) {
        cplx acc = 0;
        for (int j = 0; j < nj; ++j)
          acc += pf.weights[j] * tab[static_cast<std::size_t>(j) * dim + rp] *
                 tab[static_cast<std::size_t>(j) * dim + r] * v0[j];
        blk(rp, r) = acc;
        blk(r, rp) = std::conj(acc);
      }
    op.blocks[m + b.lmax] = std::move(blk);
  }
  return op;
}

inline AxisymmetricOperator hamiltonian_blocks(const HarmonicBasis& b, double hbar, double eps,
                                               const Potential& v) {
  AxisymmetricOperator op = potential_blocks(b, v);
  const double e2 = eps * eps;
  for (int m = -b.lmax; m <= b.lmax; ++m) {
    int dim = op.block_dim(m);
    CMatrix& blk = op.block(m);
    for (int rp = 0; rp < dim; ++rp)
      for (int r = 0; r < dim; ++r) blk(rp, r) *= e2;
    for (int r = 0; r < dim; ++r) {
      double l = std::abs(m) + r;
      blk(r, r) += 0.5 * hbar * hbar * l * (l + 1.0);
    }
  }
  return op;
}

// Cluster block projection per m-block: zero entries with l' != l, which for
// a block means off-diagonal entries.
inline AxisymmetricOperator average_blocks(const AxisymmetricOperator& op) {
  AxisymmetricOperator out = op;
  for (CMatrix& blk : out.blocks)
    for (int i = 0; i < blk.size(); ++i)
      for (int j = 0; j < blk.size(); ++j)
        if (i != j) blk(i, j) = 0.0;
  return out;
}

struct AxisymEigensystem {
  int lmax = 0;
  std::vector<Eigensystem> per_m;  // index m + lmax

  const Eigensystem& at(int m) const { return per_m[m + lmax]; }
};

inline AxisymEigensystem eig_blocks(const AxisymmetricOperator& op) {
  AxisymEigensystem es;
  es.lmax = op.lmax;
  es.per_m.resize(op.blocks.size());
  for (std::size_t i = 0; i < op.blocks.size(); ++i) es.per_m[i] = hermitian_eig(op.blocks[i]);
  return es;
}

inline std::vector<double> all_eigenvalues(const AxisymEigensystem& es) {
  std::vector<double> out;
  for (const Eigensystem& e : es.per_m)
    out.insert(out.end(), e.values.begin(), e.values.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace zoll
