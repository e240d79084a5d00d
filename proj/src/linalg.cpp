#include "coloke/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coloke::linalg {

namespace {

constexpr std::size_t kMaxEigDim = 64;
constexpr std::size_t kQrSweepCap = 10000;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

Matrix Matrix::transpose() const {
  Matrix T(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
  return T;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  require(cols_ == rhs.rows_, "Matrix::operator*: inner dimensions differ");
  Matrix C(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) C(i, j) += a * rhs(k, j);
    }
  }
  return C;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  require(rows_ == rhs.rows_ && cols_ == rhs.cols_, "Matrix::operator+: shape mismatch");
  Matrix C = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) C.data_[i] += rhs.data_[i];
  return C;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  require(rows_ == rhs.rows_ && cols_ == rhs.cols_, "Matrix::operator-: shape mismatch");
  Matrix C = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) C.data_[i] -= rhs.data_[i];
  return C;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  require(rows_ == rhs.rows_ && cols_ == rhs.cols_, "Matrix::operator+=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

std::vector<double> Matrix::apply(std::span<const double> x) const {
  require(x.size() == cols_, "Matrix::apply: vector length mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

double Matrix::frobenius_norm() const {
  double acc = 0.0;
  for (double v : data_) acc += v * v;
  return std::sqrt(acc);
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix outer(std::span<const double> a, std::span<const double> b) {
  Matrix C(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) C(i, j) = a[i] * b[j];
  return C;
}

Matrix solve(const Matrix& A, const Matrix& B) {
  require(A.rows() == A.cols(), "solve: A must be square");
  require(A.rows() == B.rows(), "solve: A and B row counts differ");
  const std::size_t n = A.rows(), m = B.cols();
  Matrix L = A, X = B;
  // scale-aware singularity cutoff
  double amax = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) amax = std::max(amax, std::abs(L(i, j)));
  const double tiny = std::max(amax, 1.0) * n * std::numeric_limits<double>::epsilon() * 1e-2;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(L(i, col)) > std::abs(L(piv, col))) piv = i;
    if (std::abs(L(piv, col)) <= tiny) throw std::runtime_error("solve: matrix is singular");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(L(piv, j), L(col, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(X(piv, j), X(col, j));
    }
    const double d = L(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = L(i, col) / d;
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) L(i, j) -= f * L(col, j);
      for (std::size_t j = 0; j < m; ++j) X(i, j) -= f * X(col, j);
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    const double d = L(col, col);
    for (std::size_t j = 0; j < m; ++j) {
      double acc = X(col, j);
      for (std::size_t k = col + 1; k < n; ++k) acc -= L(col, k) * X(k, j);
      X(col, j) = acc / d;
    }
  }
  return X;
}

Matrix inverse(const Matrix& A) { return solve(A, Matrix::identity(A.rows())); }

namespace {

// Householder reduction of A (in place) to upper Hessenberg form.
// Only the Hessenberg part of the result is meaningful afterwards.
void hessenberg_reduce(Matrix& A) {
  const std::size_t n = A.rows();
  if (n < 3) return;
  std::vector<double> ort(n, 0.0);
  const std::size_t low = 0, igh = n - 1;
  for (std::size_t m = low + 1; m <= igh - 1; ++m) {
    double h = 0.0, scale = 0.0;
    ort[m] = 0.0;
    for (std::size_t i = m; i <= igh; ++i) scale += std::abs(A(i, m - 1));
    if (scale == 0.0) continue;
    for (std::size_t i = igh + 1; i-- > m;) {
      ort[i] = A(i, m - 1) / scale;
      h += ort[i] * ort[i];
    }
    double g = std::sqrt(h);
    if (ort[m] > 0.0) g = -g;
    h -= ort[m] * g;
    ort[m] -= g;
    // (I - u u^T / h) * A
    for (std::size_t j = m; j < n; ++j) {
      double f = 0.0;
      for (std::size_t i = igh + 1; i-- > m;) f += ort[i] * A(i, j);
      f /= h;
      for (std::size_t i = m; i <= igh; ++i) A(i, j) -= f * ort[i];
    }
    // ... * (I - u u^T / h)
    for (std::size_t i = 0; i <= igh; ++i) {
      double f = 0.0;
      for (std::size_t j = igh + 1; j-- > m;) f += ort[j] * A(i, j);
      f /= h;
      for (std::size_t j = m; j <= igh; ++j) A(i, j) -= f * ort[j];
    }
    A(m, m - 1) = scale * g;
    for (std::size_t i = m + 1; i <= igh; ++i) A(i, m - 1) = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
// Follows the classic ALGOL/Fortran formulation (Martin, Peters, Wilkinson).
// Conjugate pairs come out adjacent with the positive imaginary part first.
void hqr_eigenvalues(Matrix& H, std::vector<double>& wr, std::vector<double>& wi) {
  const int n = static_cast<int>(H.rows());
  wr.assign(n, 0.0);
  wi.assign(n, 0.0);
  if (n == 0) return;

  double norm = 0.0;
  {
    int k = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = k; j < n; ++j) norm += std::abs(H(i, j));
      k = i;
    }
  }

  const int low = 0;
  int en = n - 1;
  double t = 0.0;
  long itn = static_cast<long>(kQrSweepCap);
  double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, zz = 0;

  while (en >= low) {
    int its = 0;
    const int na = en - 1;
    const int enm2 = na - 1;
    bool deflated = false;
    while (!deflated) {
      int l;
      for (l = en; l > low; --l) {
        s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
        if (s == 0.0) s = norm;
        const double tst1 = s;
        const double tst2 = tst1 + std::abs(H(l, l - 1));
        if (tst2 == tst1) break;
      }
      x = H(en, en);
      if (l == en) {  // one root found
        wr[en] = x + t;
        wi[en] = 0.0;
        en = na;
        deflated = true;
        break;
      }
      y = H(na, na);
      w = H(en, na) * H(na, en);
      if (l == na) {  // two roots found
        p = (y - x) / 2.0;
        q = p * p + w;
        zz = std::sqrt(std::abs(q));
        x += t;
        if (q >= 0.0) {
          zz = p + (p >= 0.0 ? zz : -zz);
          wr[na] = x + zz;
          wr[en] = wr[na];
          if (zz != 0.0) wr[en] = x - w / zz;
          wi[na] = 0.0;
          wi[en] = 0.0;
        } else {
          wr[na] = x + p;
          wr[en] = x + p;
          wi[na] = zz;
          wi[en] = -zz;
        }
        en = enm2;
        deflated = true;
        break;
      }
      if (itn == 0) throw std::runtime_error("eig: QR iteration sweep cap exceeded");
      if (its == 10 || its == 20) {  // exceptional shift
        t += x;
        for (int i = low; i <= en; ++i) H(i, i) -= x;
        s = std::abs(H(en, na)) + std::abs(H(na, enm2));
        x = 0.75 * s;
        y = x;
        w = -0.4375 * s * s;
      }
      ++its;
      --itn;
      // two consecutive small sub-diagonal elements?
      int m;
      for (m = enm2; m >= l; --m) {
        zz = H(m, m);
        r = x - zz;
        s = y - zz;
        p = (r * s - w) / H(m + 1, m) + H(m, m + 1);
        q = H(m + 1, m + 1) - zz - r - s;
        r = H(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        const double tst1 =
            std::abs(p) * (std::abs(H(m - 1, m - 1)) + std::abs(zz) + std::abs(H(m + 1, m + 1)));
        const double tst2 = tst1 + std::abs(H(m, m - 1)) * (std::abs(q) + std::abs(r));
        if (tst2 == tst1) break;
      }
      for (int i = m + 2; i <= en; ++i) {
        H(i, i - 2) = 0.0;
        if (i > m + 2) H(i, i - 3) = 0.0;
      }
      // double QR step on rows l..en, columns m..en
      for (int k = m; k <= na; ++k) {
        const bool notlast = (k != na);
        if (k != m) {
          p = H(k, k - 1);
          q = H(k + 1, k - 1);
          r = notlast ? H(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        s = std::sqrt(p * p + q * q + r * r);
        if (p < 0.0) s = -s;
        if (k != m) {
          H(k, k - 1) = -s * x;
        } else if (l != m) {
          H(k, k - 1) = -H(k, k - 1);
        }
        p += s;
        x = p / s;
        y = q / s;
        zz = r / s;
        q /= p;
        r /= p;
        if (!notlast) {
          for (int j = k; j < n; ++j) {  // row modification
            p = H(k, j) + q * H(k + 1, j);
            H(k, j) -= p * x;
            H(k + 1, j) -= p * y;
          }
          const int imax = std::min(en, k + 3);
          for (int i = 0; i <= imax; ++i) {  // column modification
            p = x * H(i, k) + y * H(i, k + 1);
            H(i, k) -= p;
            H(i, k + 1) -= p * q;
          }
        } else {
          for (int j = k; j < n; ++j) {
            p = H(k, j) + q * H(k + 1, j) + r * H(k + 2, j);
            H(k, j) -= p * x;
            H(k + 1, j) -= p * y;
            H(k + 2, j) -= p * zz;
          }
          const int imax = std::min(en, k + 3);
          for (int i = 0; i <= imax; ++i) {
            p = x * H(i, k) + y * H(i, k + 1) + zz * H(i, k + 2);
            H(i, k) -= p;
            H(i, k + 1) -= p * q;
            H(i, k + 2) -= p * r;
          }
        }
      }
    }
  }
}

using cplx = std::complex<double>;

struct ComplexLU {
  std::size_t n = 0;
  std::vector<cplx> lu;
  std::vector<std::size_t> piv;
};

// LU factorization of (A - lambda I) with partial pivoting. Tiny pivots are
// replaced so that inverse iteration can amplify the null direction.
ComplexLU shifted_lu(const Matrix& A, cplx lambda, double tiny) {
  const std::size_t n = A.rows();
  ComplexLU f;
  f.n = n;
  f.lu.resize(n * n);
  f.piv.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      f.lu[i * n + j] = cplx(A(i, j)) - (i == j ? lambda : cplx(0.0));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(f.lu[i * n + col]) > std::abs(f.lu[p * n + col])) p = i;
    f.piv[col] = p;
    if (p != col)
      for (std::size_t j = 0; j < n; ++j) std::swap(f.lu[p * n + j], f.lu[col * n + j]);
    if (std::abs(f.lu[col * n + col]) < tiny) f.lu[col * n + col] = cplx(tiny);
    const cplx d = f.lu[col * n + col];
    for (std::size_t i = col + 1; i < n; ++i) {
      const cplx m = f.lu[i * n + col] / d;
      f.lu[i * n + col] = m;
      if (m == cplx(0.0)) continue;
      for (std::size_t j = col + 1; j < n; ++j) f.lu[i * n + j] -= m * f.lu[col * n + j];
    }
  }
  return f;
}

void lu_solve_in_place(const ComplexLU& f, std::vector<cplx>& b) {
  const std::size_t n = f.n;
  for (std::size_t col = 0; col < n; ++col) {
    if (f.piv[col] != col) std::swap(b[f.piv[col]], b[col]);
    for (std::size_t i = col + 1; i < n; ++i) b[i] -= f.lu[i * n + col] * b[col];
  }
  for (std::size_t col = n; col-- > 0;) {
    for (std::size_t k = col + 1; k < n; ++k) b[col] -= f.lu[col * n + k] * b[k];
    b[col] /= f.lu[col * n + col];
  }
}

double cnorm(const std::vector<cplx>& v) {
  double acc = 0.0;
  for (const cplx& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

void project_out(std::vector<cplx>& v, const std::vector<std::vector<cplx>>& basis) {
  for (const auto& u : basis) {
    cplx dot(0.0);
    for (std::size_t i = 0; i < v.size(); ++i) dot += std::conj(u[i]) * v[i];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * u[i];
  }
}

// Fix a deterministic phase: the largest-magnitude entry is made real positive.
void normalize_with_phase(std::vector<cplx>& v) {
  const double nv = cnorm(v);
  if (nv == 0.0) return;
  std::size_t imax = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  const cplx ph = v[imax] == cplx(0.0) ? cplx(1.0) : v[imax] / std::abs(v[imax]);
  for (cplx& z : v) z = z / ph / nv;
}

// Eigenvector for a known eigenvalue by inverse iteration, orthogonalized
// against previously found vectors of the same eigenvalue cluster.
std::vector<cplx> inverse_iteration(const Matrix& A, cplx lambda,
                                    const std::vector<std::vector<cplx>>& cluster_prev,
                                    std::size_t salt) {
  const std::size_t n = A.rows();
  const double scale = std::max(A.frobenius_norm(), 1e-30);
  const ComplexLU f = shifted_lu(A, lambda, scale * 1e-14);
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = cplx(1.0 + 0.25 * std::cos(0.7390851332151607 * double((i + 1) * (salt + 1))),
                0.1 * std::sin(0.31 * double(i + salt + 1)));
  project_out(v, cluster_prev);
  normalize_with_phase(v);
  for (int iter = 0; iter < 4; ++iter) {
    lu_solve_in_place(f, v);
    project_out(v, cluster_prev);
    const double nv = cnorm(v);
    if (nv == 0.0) break;
    for (cplx& z : v) z /= nv;
  }
  project_out(v, cluster_prev);
  normalize_with_phase(v);
  return v;
}

double eig_residual(const Matrix& A, cplx lambda, const std::vector<cplx>& v) {
  const std::size_t n = A.rows();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cplx r(0.0);
    for (std::size_t j = 0; j < n; ++j) r += cplx(A(i, j)) * v[j];
    r -= lambda * v[i];
    acc += std::norm(r);
  }
  return std::sqrt(acc);
}

}  // namespace

EigenDecomposition eig(const Matrix& A) {
  require(A.rows() == A.cols(), "eig: matrix must be square");
  require(A.rows() >= 1 && A.rows() <= kMaxEigDim, "eig: dimension out of range");
  if (!A.all_finite()) throw std::invalid_argument("eig: matrix has non-finite entries");

  const std::size_t n = A.rows();
  Matrix H = A;
  hessenberg_reduce(H);
  std::vector<double> wr, wi;
  hqr_eigenvalues(H, wr, wi);

  // sort by descending real part; within ties positive imaginary part first
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (wr[a] != wr[b]) return wr[a] > wr[b];
    return wi[a] > wi[b];
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = cplx(wr[order[i]], wi[order[i]]);

  const double scale = std::max(A.frobenius_norm(), 1e-30);
  const double cluster_tol = scale * 1e-8;
  const double defect_tol = scale * 1e-6;
  const Matrix At = A.transpose();

  out.right_eigenvectors.resize(n);
  out.left_eigenvectors.resize(n);

  // group equal eigenvalues so repeated ones get independent directions
  std::vector<std::vector<cplx>> cluster_right, cluster_left;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx lambda = out.eigenvalues[i];
    if (i > 0 && std::abs(lambda - std::conj(out.eigenvalues[i - 1])) <= cluster_tol &&
        lambda.imag() < 0.0) {
      // bottom half of a conjugate pair: conjugate the partner's vectors
      out.right_eigenvectors[i].resize(n);
      out.left_eigenvectors[i].resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        out.right_eigenvectors[i][k] = std::conj(out.right_eigenvectors[i - 1][k]);
        out.left_eigenvectors[i][k] = std::conj(out.left_eigenvectors[i - 1][k]);
      }
      continue;
    }
    if (i == 0 || std::abs(lambda - out.eigenvalues[i - 1]) > cluster_tol) {
      cluster_right.clear();
      cluster_left.clear();
    }
    std::vector<cplx> v = inverse_iteration(A, lambda, cluster_right, i);
    // left vector w satisfies w^H A = lambda w^H, i.e. A^T conj(w) = lambda conj(w)
    std::vector<cplx> u = inverse_iteration(At, lambda, cluster_left, i);
    cluster_right.push_back(v);
    cluster_left.push_back(u);
    out.right_eigenvectors[i] = std::move(v);
    std::vector<cplx> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = std::conj(u[k]);
    out.left_eigenvectors[i] = std::move(w);
  }

  // residual checks decide defectiveness
  for (std::size_t i = 0; i < n; ++i) {
    const cplx lambda = out.eigenvalues[i];
    if (eig_residual(A, lambda, out.right_eigenvectors[i]) > defect_tol) out.is_defective = true;
    // w^H A = lambda w^H  <=>  A^T conj(w) = lambda conj(w)
    std::vector<cplx> wc(n);
    for (std::size_t k = 0; k < n; ++k) wc[k] = std::conj(out.left_eigenvectors[i][k]);
    if (eig_residual(At, lambda, wc) > defect_tol) out.is_defective = true;
  }

  // scale left vectors to the bi-orthogonal normalization w^H v = 1
  for (std::size_t i = 0; i < n; ++i) {
    cplx dot(0.0);
    for (std::size_t k = 0; k < n; ++k)
      dot += std::conj(out.left_eigenvectors[i][k]) * out.right_eigenvectors[i][k];
    if (std::abs(dot) < 1e-8) {
      // try re-pairing within the equal-eigenvalue cluster
      bool fixed = false;
      for (std::size_t j = 0; j < n && !fixed; ++j) {
        if (j == i || std::abs(out.eigenvalues[j] - out.eigenvalues[i]) > cluster_tol) continue;
        cplx alt(0.0);
        for (std::size_t k = 0; k < n; ++k)
          alt += std::conj(out.left_eigenvectors[j][k]) * out.right_eigenvectors[i][k];
        if (std::abs(alt) >= 1e-8) {
          std::swap(out.left_eigenvectors[i], out.left_eigenvectors[j]);
          dot = alt;
          fixed = true;
        }
      }
      if (!fixed) {
        out.is_defective = true;
        continue;
      }
    }
    for (std::size_t k = 0; k < n; ++k) out.left_eigenvectors[i][k] /= std::conj(dot);
  }

  return out;
}

Matrix ridge_reconstruction(const Matrix& Z, const Matrix& Phi, double rho) {
  require(Z.cols() == Phi.cols(), "ridge_reconstruction: sample counts differ");
  require(rho >= 0.0, "ridge_reconstruction: rho must be non-negative");
  const std::size_t r = Phi.rows();
  Matrix G(r, r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < Phi.cols(); ++k) acc += Phi(i, k) * Phi(j, k);
      G(i, j) = acc;
    }
    G(i, i) += rho;
  }
  // solve (Phi Phi^T + rho I) X = Phi Z^T, then C = X^T
  Matrix R(r, Z.rows());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < Z.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < Phi.cols(); ++k) acc += Phi(i, k) * Z(j, k);
      R(i, j) = acc;
    }
  return solve(G, R).transpose();
}

Matrix sherman_morrison_update(const Matrix& P, std::span<const double> u) {
  require(P.rows() == P.cols(), "sherman_morrison_update: P must be square");
  require(u.size() == P.rows(), "sherman_morrison_update: vector length mismatch");
  const std::size_t n = P.rows();
  const std::vector<double> Pu = P.apply(u);
  double utPu = 0.0;
  for (std::size_t i = 0; i < n; ++i) utPu += u[i] * Pu[i];
  const double denom = 1.0 + utPu;
  if (denom <= 1e-12) throw std::runtime_error("sherman_morrison_update: denominator not positive");
  // P u and u^T P coincide only for symmetric P; compute both sides properly
  std::vector<double> utP(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += u[i] * P(i, j);
    utP[j] = acc;
  }
  Matrix out = P;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) -= Pu[i] * utP[j] / denom;
  return out;
}

std::vector<double> mat_pow_apply(const Matrix& K, std::size_t j, std::span<const double> v) {
  require(K.rows() == K.cols(), "mat_pow_apply: matrix must be square");
  require(v.size() == K.cols(), "mat_pow_apply: vector length mismatch");
  std::vector<double> x(v.begin(), v.end());
  for (std::size_t step = 0; step < j; ++step) x = K.apply(x);
  return x;
}

}  // namespace coloke::linalg
