#include "stir/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stir/errors.hpp"

namespace stir {

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::one_norm() const {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

std::vector<double> vec_mat(const std::vector<double>& v, const Matrix& m) {
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += vi * m(i, j);
  }
  return out;
}

std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& v) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

LuFactors::LuFactors(Matrix a) : lu_(std::move(a)) {
  const std::size_t n = lu_.rows();
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(lu_(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, col));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best < 1e-300) {
      singular_ = true;
      continue;
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(col, j), lu_(pivot, j));
      std::swap(perm_[col], perm_[pivot]);
    }
    const double inv = 1.0 / lu_(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = lu_(i, col) * inv;
      lu_(i, col) = f;
      if (f == 0.0) continue;
      for (std::size_t j = col + 1; j < n; ++j) lu_(i, j) -= f * lu_(col, j);
    }
  }
}

std::vector<double> LuFactors::solve(std::vector<double> b) const {
  if (singular_) throw Error("LU solve on a singular matrix");
  const std::size_t n = lu_.rows();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 1; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * x[j];
    x[ii] = s / lu_(ii, ii);
  }
  return x;
}

Matrix LuFactors::solve(Matrix b) const {
  const std::size_t n = b.rows(), m = b.cols();
  Matrix out(n, m);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
    const std::vector<double> x = solve(col);
    for (std::size_t i = 0; i < n; ++i) out(i, j) = x[i];
  }
  return out;
}

std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
  return LuFactors(std::move(a)).solve(std::move(b));
}

Matrix expm(const Matrix& a) {
  // Higham's scaling-and-squaring with the [13/13] Pade approximant.
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0, 129060195264000.0,   10559470521600.0,
                             670442572800.0,     33522128640.0,       1323241920.0,
                             40840800.0,         960960.0,            16380.0,
                             182.0,              1.0};
  const std::size_t n = a.rows();
  const double theta13 = 5.371920351148152;
  const double norm = a.one_norm();
  int squarings = 0;
  Matrix as = a;
  if (norm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    as *= std::ldexp(1.0, -squarings);
  }

  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;
  const Matrix ident = Matrix::identity(n);

  Matrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
  Matrix u = as * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  Matrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
  Matrix v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

  Matrix num = v + u;
  Matrix den = v - u;
  Matrix r = LuFactors(std::move(den)).solve(std::move(num));
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

namespace {

using cplx = std::complex<double>;

// In-place Householder reduction to upper Hessenberg form.
void hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double scale = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) scale += std::abs(a(i, k));
    if (scale == 0.0) continue;
    double h = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a(i, k) / scale;
      h += v[i] * v[i];
    }
    double g = std::sqrt(h);
    if (v[k + 1] > 0) g = -g;
    h -= v[k + 1] * g;
    v[k + 1] -= g;
    // Apply P = I - vv^T/h from both sides.
    for (std::size_t j = 0; j < n; ++j) {
      double f = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) f += v[i] * a(i, j);
      f /= h;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= f * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double f = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) f += a(i, j) * v[j];
      f /= h;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * v[j];
    }
    a(k + 1, k) = scale * g;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Complex 2x2 unitary that maps (f, g) to (r, 0):
//   row_i' = (conj(f) row_i + conj(g) row_j) / r
//   row_j' = (-g row_i + f row_j) / r
struct Givens {
  cplx f, g;
  double r;
};

cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
  // Eigenvalue of [[a,b],[c,d]] closer to d.
  const cplx tr = a + d;
  const cplx disc = std::sqrt(tr * tr - 4.0 * (a * d - b * c));
  const cplx l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
  return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& a_in) {
  if (a_in.rows() != a_in.cols()) throw Error("eigenvalues: matrix not square");
  const std::size_t n = a_in.rows();
  std::vector<cplx> eig(n);
  if (n == 0) return eig;
  Matrix ar = a_in;
  hessenberg(ar);

  std::vector<cplx> h(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h[i * n + j] = ar(i, j);
  auto H = [&](std::size_t i, std::size_t j) -> cplx& { return h[i * n + j]; };

  const double eps = 1e-15;
  std::size_t hi = n - 1;
  long iters = 0, since_deflate = 0;
  const long max_iters = 80 * static_cast<long>(n) + 200;
  while (true) {
    // Deflate negligible subdiagonals.
    for (std::size_t k = hi; k > 0; --k) {
      const double s = std::abs(H(k - 1, k - 1)) + std::abs(H(k, k));
      if (std::abs(H(k, k - 1)) <= eps * std::max(s, 1e-300)) H(k, k - 1) = 0.0;
    }
    while (hi > 0 && H(hi, hi - 1) == 0.0) {
      eig[hi] = H(hi, hi);
      if (hi == 0) break;
      --hi;
      since_deflate = 0;
    }
    if (hi == 0) {
      eig[0] = H(0, 0);
      break;
    }
    std::size_t lo = hi;
    while (lo > 0 && H(lo, lo - 1) != 0.0) --lo;

    if (++iters > max_iters) throw Error("eigenvalue iteration failed to converge");
    cplx shift = wilkinson_shift(H(hi - 1, hi - 1), H(hi - 1, hi), H(hi, hi - 1), H(hi, hi));
    if (++since_deflate % 12 == 0) {
      // Exceptional shift to break rare cycling.
      shift = H(hi, hi) + cplx(std::abs(H(hi, hi - 1)), 0.0) * (0.75 + 0.05 * (since_deflate % 5));
    }

    for (std::size_t i = lo; i <= hi; ++i) H(i, i) -= shift;
    // QR step on the active block via Givens rotations.
    std::vector<Givens> rots(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
      const cplx f = H(k, k), g = H(k + 1, k);
      const double r = std::sqrt(std::norm(f) + std::norm(g));
      Givens giv{f, g, r};
      rots[k - lo] = giv;
      if (r == 0.0) continue;
      for (std::size_t j = k; j <= hi; ++j) {
        const cplx x = H(k, j), y = H(k + 1, j);
        H(k, j) = (std::conj(f) * x + std::conj(g) * y) / r;
        H(k + 1, j) = (-g * x + f * y) / r;
      }
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const Givens& giv = rots[k - lo];
      if (giv.r == 0.0) continue;
      const std::size_t top = std::min(hi, k + 2);
      for (std::size_t i = lo; i <= top; ++i) {
        const cplx x = H(i, k), y = H(i, k + 1);
        H(i, k) = (x * giv.f + y * giv.g) / giv.r;
        H(i, k + 1) = (-x * std::conj(giv.g) + y * std::conj(giv.f)) / giv.r;
      }
    }
    for (std::size_t i = lo; i <= hi; ++i) H(i, i) += shift;
  }
  return eig;
}

}  // namespace stir
