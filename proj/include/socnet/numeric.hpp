#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace socnet {

// Row-major dense matrix, just enough for the small networks in this project.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// y = M x + b
inline void affine(const Matrix& m, std::span<const double> x, std::span<const double> b,
                   std::vector<double>& y) {
  y.assign(static_cast<std::size_t>(m.rows), 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double* row = m.a.data() + static_cast<std::size_t>(i) * m.cols;
    double s = b.empty() ? 0.0 : b[i];
    for (int j = 0; j < m.cols; ++j) s += row[j] * x[j];
    y[static_cast<std::size_t>(i)] = s;
  }
}

inline double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
inline double stddev_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double sem_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  return stddev_of(v) / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace socnet
