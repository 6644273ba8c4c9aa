#include "anisoflow/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anisoflow {

Covector Covector::basis(std::size_t n, std::size_t i) {
  if (i > n) throw std::out_of_range("basis index exceeds dimension");
  Covector e(n + 1);
  e[i] = 1.0;
  return e;
}

double Covector::norm() const { return std::sqrt(dot(*this)); }

double Covector::dot(const Covector& o) const {
  double s = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] * o.c_[i];
  return s;
}

Covector& Covector::operator+=(const Covector& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Covector& Covector::operator-=(const Covector& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Covector& Covector::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

// Packed layouts: for sorted i <= j <= k the offsets enumerate index sets in
// lexicographic order, giving (m+1)m/2 resp. the tetrahedral count of entries.

SymTensor2::SymTensor2(std::size_t size) : size_(size), data_(size * (size + 1) / 2, 0.0) {}

SymTensor2 SymTensor2::from_dense(std::size_t size, std::span<const double> dense) {
  SymTensor2 t(size);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = i; j < size; ++j) t(i, j) = dense[i * size + j];
  return t;
}

std::size_t SymTensor2::index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  // row i starts after rows 0..i-1 which hold size, size-1, ... entries
  return i * size_ - i * (i - 1) / 2 + (j - i);
}

double SymTensor2::apply(const Covector& p, const Covector& q) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t j = 0; j < size_; ++j) s += (*this)(i, j) * p[i] * q[j];
  return s;
}

SymTensor3::SymTensor3(std::size_t size)
    : size_(size), data_(size * (size + 1) * (size + 2) / 6, 0.0) {}

SymTensor3 SymTensor3::from_dense(std::size_t size, std::span<const double> dense) {
  SymTensor3 t(size);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = i; j < size; ++j)
      for (std::size_t k = j; k < size; ++k) t(i, j, k) = dense[(i * size + j) * size + k];
  return t;
}

std::size_t SymTensor3::index(std::size_t i, std::size_t j, std::size_t k) const {
  std::size_t a[3] = {i, j, k};
  std::sort(a, a + 3);
  // count of sorted triples whose first index is below a[0]
  std::size_t off = 0;
  for (std::size_t f = 0; f < a[0]; ++f) {
    const std::size_t m = size_ - f;
    off += m * (m + 1) / 2;
  }
  // within first index a[0]: pairs (j,k) with a[0] <= j <= k over m values
  const std::size_t m = size_ - a[0];
  const std::size_t jj = a[1] - a[0];
  const std::size_t kk = a[2] - a[0];
  return off + jj * m - jj * (jj - 1) / 2 + (kk - jj);
}

double SymTensor3::apply(const Covector& p, const Covector& q, const Covector& r) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t j = 0; j < size_; ++j) {
      const double pq = p[i] * q[j];
      if (pq == 0.0) continue;
      for (std::size_t k = 0; k < size_; ++k) s += (*this)(i, j, k) * pq * r[k];
    }
  return s;
}

}  // namespace anisoflow
