#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fcpd {

/// Largest polynomial degree accepted anywhere in the library.
inline constexpr int kMaxDegree = 10;
/// Largest number of samples a single growing window may absorb.
inline constexpr std::size_t kMaxWindowLength = 100000;

/// Equidistant, finite observations indexed 0..size()-1.
class TimeSeries {
 public:
  TimeSeries() = default;
  /// Throws InvalidData when empty or when a value is NaN/infinite.
  explicit TimeSeries(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  bool operator==(const TimeSeries&) const = default;

 private:
  std::vector<double> values_;
};

/// Closed form of the squared discrete norm of the k-th monic Chebyshev
/// polynomial over the sample indices 0..last_index.
double squared_norm(int k, std::size_t last_index);

/// Discrete Chebyshev polynomials p_0..p_K, monic and orthogonal over the
/// sample indices 0..last_index (a window of last_index + 1 points).
class OrthoBasis {
 public:
  OrthoBasis(std::size_t last_index, int degree);

  std::size_t last_index() const noexcept { return last_index_; }
  std::size_t window_length() const noexcept { return last_index_ + 1; }
  int degree() const noexcept { return degree_; }

  /// Coefficient of x^j in p_k, for 0 <= j <= k.
  double coeff(int k, int j) const { return coeffs_[index(k, j)]; }
  double squared_norm(int k) const { return sq_norms_.at(static_cast<std::size_t>(k)); }
  std::span<const double> squared_norms() const noexcept { return sq_norms_; }

  /// p_k(x), evaluated with the three-term recurrence.
  double eval(int k, double x) const;
  /// p_0(x)..p_K(x).
  std::vector<double> eval_all(double x) const;

 private:
  static std::size_t index(int k, int j) {
    return static_cast<std::size_t>(k) * (static_cast<std::size_t>(k) + 1) / 2 + static_cast<std::size_t>(j);
  }

  std::size_t last_index_;
  int degree_;
  std::vector<double> coeffs_;  // packed lower triangle, row k holds p_k
  std::vector<double> sq_norms_;
};

inline OrthoBasis build_basis(std::size_t last_index, int degree) { return OrthoBasis(last_index, degree); }

/// Recurrence weight b_k in p_{k+1} = (x - N/2) p_k - b_k p_{k-1}.
double recurrence_weight(int k, std::size_t last_index);

/// Orthogonal-expansion coefficients of one window: alpha[0] estimates the
/// average, alpha[1] the slope, alpha[2] the curvature.
struct ShapeVector {
  std::vector<double> alpha;
  std::size_t last_index = 0;

  int degree() const noexcept { return static_cast<int>(alpha.size()) - 1; }
  bool operator==(const ShapeVector&) const = default;
};

/// Least-squares projection of `window` onto the degree-K basis.
ShapeVector fit(std::span<const double> window, int degree);

/// Value of the fitted polynomial at sample index x.
double evaluate(const ShapeVector& shape, const OrthoBasis& basis, double x);
/// Convenience overload that builds the basis for the shape's window.
double evaluate(const ShapeVector& shape, double x);

/// Relative distance between two shape vectors of the same window, measured
/// in orthonormal coordinates (alpha_k scaled by ||p_k||) so that every
/// component is in value units.
double shape_distance(const ShapeVector& a, const ShapeVector& b);

/// Window that absorbs one sample at a time. Each grow() costs O(K^2)
/// regardless of how many samples the window already holds: the window keeps
/// compensated power moments M_j = sum y_n n^j and recombines them with the
/// basis regenerated for the new length.
class GrowingWindow {
 public:
  explicit GrowingWindow(int degree, std::size_t start_index = 0);

  /// Throws InvalidData for NaN/infinite y.
  void grow(double y);

  int degree() const noexcept { return degree_; }
  std::size_t start_index() const noexcept { return start_index_; }
  std::size_t count() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  double last_value() const noexcept { return last_value_; }

  /// True once count() >= degree() + 1.
  bool has_shape() const noexcept { return count_ >= static_cast<std::size_t>(degree_) + 1; }
  const ShapeVector& shape() const;
  /// Fitted value at the newest sample's local index.
  double predicted_last() const;

  /// Compensated power moments M_0..M_K at full internal precision.
  std::vector<long double> moments() const;

 private:
  void refresh_shape();

  int degree_;
  std::size_t start_index_;
  std::size_t count_ = 0;
  double last_value_ = 0.0;
  std::vector<long double> moments_;
  std::vector<long double> compensation_;
  std::vector<long double> coeff_scratch_;
  ShapeVector shape_;
};

}  // namespace fcpd
