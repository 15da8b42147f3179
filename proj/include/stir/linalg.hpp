#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace stir {

// Dense row-major matrix.  Sized for the exact small-N oracles; no sparse path.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix transpose() const;
  double one_norm() const;  // max column sum of absolute values

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);

// row vector * matrix
std::vector<double> vec_mat(const std::vector<double>& v, const Matrix& m);
// matrix * column vector
std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& v);

// LU factorisation with partial pivoting, kept for repeated solves.
class LuFactors {
 public:
  explicit LuFactors(Matrix a);
  std::vector<double> solve(std::vector<double> b) const;
  Matrix solve(Matrix b) const;  // column-wise
  bool singular() const { return singular_; }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
};

std::vector<double> solve_linear(Matrix a, std::vector<double> b);

// Matrix exponential by scaling and squaring with the degree-13 Pade
// approximant.
Matrix expm(const Matrix& a);

// All eigenvalues of a real square matrix: Householder reduction to Hessenberg
// form followed by a complex shifted-QR iteration.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

}  // namespace stir
