#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace anisoflow {

// Element of the dual space V* in the basis {phi^0, ..., phi^n}. Index 0 is
// the phi^0 (height) component; indices 1..n are the spatial components.
class Covector {
 public:
  Covector() = default;
  explicit Covector(std::size_t dim_plus_one) : c_(dim_plus_one, 0.0) {}
  Covector(std::initializer_list<double> coords) : c_(coords) {}
  explicit Covector(std::vector<double> coords) : c_(std::move(coords)) {}

  // phi^i in a space of dimension n + 1.
  static Covector basis(std::size_t n, std::size_t i);

  std::size_t size() const noexcept { return c_.size(); }
  // Spatial dimension n (size - 1).
  std::size_t dim() const noexcept { return c_.size() - 1; }

  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }

  std::span<const double> coords() const noexcept { return c_; }
  std::span<double> coords() noexcept { return c_; }

  double norm() const;
  double dot(const Covector& o) const;

  Covector& operator+=(const Covector& o);
  Covector& operator-=(const Covector& o);
  Covector& operator*=(double s);

  friend Covector operator+(Covector a, const Covector& b) { return a += b; }
  friend Covector operator-(Covector a, const Covector& b) { return a -= b; }
  friend Covector operator*(double s, Covector a) { return a *= s; }
  friend Covector operator*(Covector a, double s) { return a *= s; }
  friend Covector operator-(Covector a) { return a *= -1.0; }

  bool operator==(const Covector&) const = default;

 private:
  std::vector<double> c_;
};

// Symmetric bilinear form on V*, stored once per unordered index pair.
class SymTensor2 {
 public:
  SymTensor2() = default;
  explicit SymTensor2(std::size_t size);
  // Packs a dense row-major size x size array, reading only the upper triangle.
  static SymTensor2 from_dense(std::size_t size, std::span<const double> dense);

  std::size_t size() const noexcept { return size_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[index(i, j)]; }

  double apply(const Covector& p, const Covector& q) const;
  std::size_t packed_size() const noexcept { return data_.size(); }

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::size_t size_ = 0;
  std::vector<double> data_;
};

// Symmetric trilinear form on V*, stored once per unordered index triple.
class SymTensor3 {
 public:
  SymTensor3() = default;
  explicit SymTensor3(std::size_t size);
  static SymTensor3 from_dense(std::size_t size, std::span<const double> dense);

  std::size_t size() const noexcept { return size_; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[index(i, j, k)];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[index(i, j, k)]; }

  double apply(const Covector& p, const Covector& q, const Covector& r) const;
  std::size_t packed_size() const noexcept { return data_.size(); }

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const;

  std::size_t size_ = 0;
  std::vector<double> data_;
};

}  // namespace anisoflow
