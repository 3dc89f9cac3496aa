#include "dgflow/linalg.hpp"

#include <cmath>

namespace dgflow {

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::transposed() const {
  Mat t(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

static void check_same_shape(const Mat& x, const Mat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("matrix shape mismatch");
}

Mat operator+(const Mat& x, const Mat& y) {
  check_same_shape(x, y);
  Mat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
  return r;
}

Mat operator-(const Mat& x, const Mat& y) {
  check_same_shape(x, y);
  Mat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
  return r;
}

Mat operator*(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matrix product shape mismatch");
  Mat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

Mat operator*(double s, const Mat& x) {
  Mat r = x;
  for (double& v : r.a) v *= s;
  return r;
}

Mat& operator+=(Mat& x, const Mat& y) {
  check_same_shape(x, y);
  for (size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
  return x;
}

Vec operator+(const Vec& x, const Vec& y) {
  Vec r = x;
  for (size_t i = 0; i < r.size(); ++i) r[i] += y[i];
  return r;
}

Vec operator-(const Vec& x, const Vec& y) {
  Vec r = x;
  for (size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
  return r;
}

Vec operator*(double s, const Vec& x) {
  Vec r = x;
  for (double& v : r) v *= s;
  return r;
}

Vec& operator+=(Vec& x, const Vec& y) {
  for (size_t i = 0; i < x.size(); ++i) x[i] += y[i];
  return x;
}

Vec matvec(const Mat& m, const Vec& v) {
  if (m.cols != static_cast<int>(v.size())) throw std::invalid_argument("matvec shape mismatch");
  Vec r(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm_inf(const Vec& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

double norm_inf(const Mat& m) {
  double r = 0.0;
  for (double v : m.a) r = std::max(r, std::fabs(v));
  return r;
}

double asym_defect(const Mat& m) {
  double r = 0.0;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r = std::max(r, std::fabs(m(i, j) + m(j, i)));
  return r;
}

Mat outer(const Vec& x, const Vec& y) {
  Mat r(static_cast<int>(x.size()), static_cast<int>(y.size()));
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = 0; j < y.size(); ++j) r(static_cast<int>(i), static_cast<int>(j)) = x[i] * y[j];
  return r;
}

void axpy(double s, const Vec& x, Vec& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

Vec lu_solve(Mat m, Vec b) {
  int n = m.rows;
  if (m.cols != n || static_cast<int>(b.size()) != n) throw std::invalid_argument("lu_solve shape mismatch");
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::fabs(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(m(i, k));
      if (v > best) { best = v; p = i; }
    }
    if (best == 0.0 || !std::isfinite(best)) throw std::runtime_error("lu_solve: singular matrix");
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      std::swap(b[k], b[p]);
    }
    for (int i = k + 1; i < n; ++i) {
      double f = m(i, k) / m(k, k);
      m(i, k) = f;
      for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

} // namespace dgflow
