#pragma once

// Dense complex matrices and a cyclic Jacobi eigensolver for Hermitian
// matrices.  Dependency-free and adequate for the block sizes used here
// (a few hundred).  Convergence: off-diagonal Frobenius norm below
// tol * ||A||_F.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace zoll {

using cplx = std::complex<double>;

class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}
  static CMatrix identity(int n) {
    CMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int size() const { return n_; }
  cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const cplx& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

  CMatrix operator*(const CMatrix& o) const {
    CMatrix r(n_);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) {
        cplx aik = (*this)(i, k);
        if (aik == cplx{}) continue;
        for (int j = 0; j < n_; ++j) r(i, j) += aik * o(k, j);
      }
    return r;
  }
  CMatrix operator-(const CMatrix& o) const {
    CMatrix r(n_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
  }
  CMatrix adjoint() const {
    CMatrix r(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }
  double frobenius() const {
    double s = 0;
    for (const cplx& z : a_) s += std::norm(z);
    return std::sqrt(s);
  }
  double hermiticity_defect() const {
    double worst = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j)
        worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
  }
  std::vector<cplx> apply(const std::vector<cplx>& x) const {
    std::vector<cplx> y(n_);
    for (int i = 0; i < n_; ++i) {
      cplx acc = 0;
      for (int j = 0; j < n_; ++j) acc += (*this)(i, j) * x[j];
      y[i] = acc;
    }
    return y;
  }

 private:
  int n_ = 0;
  std::vector<cplx> a_;
};

struct Eigensystem {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns are orthonormal eigenvectors
};

class eig_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two-sided unitary Jacobi rotations on the Hermitian matrix A.
inline Eigensystem hermitian_eig(CMatrix a, double tol = 1e-12, int max_sweeps = 64) {
  const int n = a.size();
  if (n == 0) return {{}, CMatrix(0)};
  if (a.hermiticity_defect() > 1e-10 * (1.0 + a.frobenius()))
    throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");
  CMatrix v = CMatrix::identity(n);
  const double anorm = a.frobenius();
  auto off = [&]() {
    double s = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };
  int sweep = 0;
  while (off() > tol * (anorm > 0 ? anorm : 1.0)) {
    if (++sweep > max_sweeps) throw eig_failure("hermitian_eig: no convergence");
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        cplx apq = a(p, q);
        double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        double app = a(p, p).real(), aqq = a(q, q).real();
        // Phase so the 2x2 block becomes real symmetric, then the classical
        // symmetric rotation angle.
        cplx phase = apq / mag;
        double tau = (aqq - app) / (2.0 * mag);
        double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        cplx sp = s * phase;  // rotation: p' = c p + sp* q ; q' = -sp p + c q
        for (int k = 0; k < n; ++k) {  // columns (right multiplication)
          cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - std::conj(sp) * akq;
          a(k, q) = sp * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {  // rows (left multiplication by adjoint)
          cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sp * aqk;
          a(q, k) = std::conj(sp) * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {  // accumulate eigenvectors
          cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - std::conj(sp) * vkq;
          v(k, q) = sp * vkp + c * vkq;
        }
      }
  }
  // Sort ascending, permuting columns.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });
  Eigensystem es;
  es.values.resize(n);
  es.vectors = CMatrix(n);
  for (int j = 0; j < n; ++j) {
    es.values[j] = a(idx[j], idx[j]).real();
    for (int i = 0; i < n; ++i) es.vectors(i, j) = v(i, idx[j]);
  }
  return es;
}

}  // namespace zoll
