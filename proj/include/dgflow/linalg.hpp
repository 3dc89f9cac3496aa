#pragma once
// Dense linear algebra for small state dimensions (d <= 16).
// Row-major matrices, LU with partial pivoting. No attempt at BLAS-level
// performance; every system this library integrates is tiny.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgflow {

using Vec = std::vector<double>;

struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a; // row-major, rows*cols

  Mat() = default;
  Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static Mat identity(int n);
  Mat transposed() const;
};

Mat operator+(const Mat& x, const Mat& y);
Mat operator-(const Mat& x, const Mat& y);
Mat operator*(const Mat& x, const Mat& y);
Mat operator*(double s, const Mat& x);
Mat& operator+=(Mat& x, const Mat& y);

Vec operator+(const Vec& x, const Vec& y);
Vec operator-(const Vec& x, const Vec& y);
Vec operator*(double s, const Vec& x);
Vec& operator+=(Vec& x, const Vec& y);

Vec matvec(const Mat& m, const Vec& v);
double dot(const Vec& x, const Vec& y);
double norm_inf(const Vec& x);
double norm_inf(const Mat& m);
// Largest absolute entry of m + m^T; zero iff m is antisymmetric.
double asym_defect(const Mat& m);
Mat outer(const Vec& x, const Vec& y);
void axpy(double s, const Vec& x, Vec& y); // y += s*x

// Solve m*x = b by LU with partial pivoting. Throws std::runtime_error on a
// numerically singular pivot.
Vec lu_solve(Mat m, Vec b);

bool all_finite(const Vec& v);

} // namespace dgflow
