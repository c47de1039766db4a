#include "fcpd/shape_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fcpd/errors.hpp"

namespace fcpd {

namespace {

void check_degree(int degree) {
  if (degree < 0) {
    throw InvalidConfiguration("polynomial degree must be non-negative, got " + std::to_string(degree));
  }
  if (degree > kMaxDegree) {
    throw InvalidConfiguration("polynomial degree " + std::to_string(degree) + " exceeds the supported maximum " +
                               std::to_string(kMaxDegree));
  }
}

void check_degree_fits(int degree, std::size_t last_index) {
  check_degree(degree);
  if (static_cast<std::size_t>(degree) > last_index) {
    throw InvalidConfiguration("degree " + std::to_string(degree) + " needs at least " + std::to_string(degree + 1) +
                               " points, window has " + std::to_string(last_index + 1));
  }
}

template <typename T>
T weight_of(int k, std::size_t last_index) {
  const T kk = static_cast<T>(k) * static_cast<T>(k);
  const T np1 = static_cast<T>(last_index) + 1;
  return kk * (np1 * np1 - kk) / (4 * (4 * kk - 1));
}

template <typename T>
T norm_of(int k, std::size_t last_index) {
  // (k!)^4 / ((2k)! (2k+1)!) built as a running ratio to keep intermediates small.
  T ratio = 1;
  for (int i = 1; i <= k; ++i) {
    const T ti = static_cast<T>(i);
    ratio *= (ti * ti * ti * ti) / (static_cast<T>(2 * i - 1) * static_cast<T>(2 * i) * static_cast<T>(2 * i) *
                                    static_cast<T>(2 * i + 1));
  }
  T product = 1;
  const T np1 = static_cast<T>(last_index) + 1;
  for (int i = -k; i <= k; ++i) {
    product *= np1 + static_cast<T>(i);
  }
  return ratio * product;
}

// Packed lower-triangular power coefficients of p_0..p_K.
template <typename T>
void power_coeffs(std::size_t last_index, int degree, std::vector<T>& out) {
  const auto row = [](int k) { return static_cast<std::size_t>(k) * (static_cast<std::size_t>(k) + 1) / 2; };
  out.assign(row(degree + 1), T{0});
  const T half = static_cast<T>(last_index) / 2;
  out[0] = 1;
  if (degree >= 1) {
    out[row(1)] = -half;
    out[row(1) + 1] = 1;
  }
  for (int k = 1; k < degree; ++k) {
    const T b = weight_of<T>(k, last_index);
    const std::size_t cur = row(k);
    const std::size_t prev = row(k - 1);
    const std::size_t next = row(k + 1);
    for (int j = 0; j <= k + 1; ++j) {
      T v = 0;
      if (j >= 1) v += out[cur + static_cast<std::size_t>(j) - 1];
      if (j <= k) v -= half * out[cur + static_cast<std::size_t>(j)];
      if (j <= k - 1) v -= b * out[prev + static_cast<std::size_t>(j)];
      out[next + static_cast<std::size_t>(j)] = v;
    }
  }
}

// p_0(x)..p_K(x) by the three-term recurrence.
template <typename T>
void recurrence_values(std::size_t last_index, int degree, T x, T* out) {
  const T shifted = x - static_cast<T>(last_index) / 2;
  out[0] = 1;
  if (degree >= 1) out[1] = shifted;
  for (int k = 1; k < degree; ++k) {
    out[k + 1] = shifted * out[k] - weight_of<T>(k, last_index) * out[k - 1];
  }
}

void check_finite(double y) {
  if (!std::isfinite(y)) {
    throw InvalidData("time series values must be finite");
  }
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw InvalidData("time series is empty");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidData("time series value at index " + std::to_string(i) + " is not finite");
    }
  }
}

double recurrence_weight(int k, std::size_t last_index) { return weight_of<double>(k, last_index); }

double squared_norm(int k, std::size_t last_index) {
  check_degree_fits(k, last_index);
  return static_cast<double>(norm_of<long double>(k, last_index));
}

OrthoBasis::OrthoBasis(std::size_t last_index, int degree) : last_index_(last_index), degree_(degree) {
  check_degree_fits(degree, last_index);
  std::vector<long double> wide;
  power_coeffs(last_index, degree, wide);
  coeffs_.assign(wide.begin(), wide.end());
  sq_norms_.reserve(static_cast<std::size_t>(degree) + 1);
  for (int k = 0; k <= degree; ++k) {
    sq_norms_.push_back(static_cast<double>(norm_of<long double>(k, last_index)));
  }
}

double OrthoBasis::eval(int k, double x) const {
  if (k < 0 || k > degree_) {
    throw InvalidConfiguration("basis has no polynomial of degree " + std::to_string(k));
  }
  long double values[kMaxDegree + 1];
  recurrence_values<long double>(last_index_, k, x, values);
  return static_cast<double>(values[k]);
}

std::vector<double> OrthoBasis::eval_all(double x) const {
  long double values[kMaxDegree + 1];
  recurrence_values<long double>(last_index_, degree_, x, values);
  return {values, values + degree_ + 1};
}

ShapeVector fit(std::span<const double> window, int degree) {
  check_degree(degree);
  if (window.size() < static_cast<std::size_t>(degree) + 1) {
    throw InsufficientData("fitting degree " + std::to_string(degree) + " needs at least " +
                           std::to_string(degree + 1) + " points, got " + std::to_string(window.size()));
  }
  const std::size_t last = window.size() - 1;
  std::vector<long double> sums(static_cast<std::size_t>(degree) + 1, 0.0L);
  long double values[kMaxDegree + 1];
  for (std::size_t n = 0; n < window.size(); ++n) {
    check_finite(window[n]);
    recurrence_values<long double>(last, degree, static_cast<long double>(n), values);
    for (int k = 0; k <= degree; ++k) {
      sums[static_cast<std::size_t>(k)] += values[k] * window[n];
    }
  }
  ShapeVector out;
  out.last_index = last;
  out.alpha.resize(sums.size());
  for (int k = 0; k <= degree; ++k) {
    out.alpha[static_cast<std::size_t>(k)] =
        static_cast<double>(sums[static_cast<std::size_t>(k)] / norm_of<long double>(k, last));
  }
  return out;
}

double evaluate(const ShapeVector& shape, const OrthoBasis& basis, double x) {
  if (shape.last_index != basis.last_index() || shape.degree() != basis.degree()) {
    throw InvalidConfiguration("shape vector and basis describe different windows");
  }
  long double values[kMaxDegree + 1];
  recurrence_values<long double>(basis.last_index(), basis.degree(), x, values);
  long double sum = 0;
  for (int k = 0; k <= basis.degree(); ++k) {
    sum += shape.alpha[static_cast<std::size_t>(k)] * values[k];
  }
  return static_cast<double>(sum);
}

double evaluate(const ShapeVector& shape, double x) {
  return evaluate(shape, OrthoBasis(shape.last_index, shape.degree()), x);
}

double shape_distance(const ShapeVector& a, const ShapeVector& b) {
  if (a.last_index != b.last_index || a.alpha.size() != b.alpha.size()) {
    throw InvalidConfiguration("shape vectors describe different windows");
  }
  long double diff = 0;
  long double ref = 0;
  for (int k = 0; k <= a.degree(); ++k) {
    const long double w = norm_of<long double>(k, a.last_index);
    const long double d = static_cast<long double>(a.alpha[static_cast<std::size_t>(k)]) -
                          b.alpha[static_cast<std::size_t>(k)];
    diff += d * d * w;
    ref += static_cast<long double>(b.alpha[static_cast<std::size_t>(k)]) * b.alpha[static_cast<std::size_t>(k)] * w;
  }
  if (ref == 0) {
    return static_cast<double>(std::sqrt(diff));
  }
  return static_cast<double>(std::sqrt(diff / ref));
}

GrowingWindow::GrowingWindow(int degree, std::size_t start_index) : degree_(degree), start_index_(start_index) {
  check_degree(degree);
  moments_.assign(static_cast<std::size_t>(degree) + 1, 0.0L);
  compensation_.assign(moments_.size(), 0.0L);
  shape_.alpha.assign(moments_.size(), 0.0);
}

void GrowingWindow::grow(double y) {
  check_finite(y);
  if (count_ >= kMaxWindowLength) {
    throw InvalidConfiguration("growing window exceeds the supported length of " + std::to_string(kMaxWindowLength));
  }
  const long double n = static_cast<long double>(count_);
  long double term = y;
  for (std::size_t j = 0; j < moments_.size(); ++j) {
    // Neumaier summation; moments_ holds the running sum, compensation_ the lost low-order part.
    const long double sum = moments_[j] + term;
    if (std::fabs(moments_[j]) >= std::fabs(term)) {
      compensation_[j] += (moments_[j] - sum) + term;
    } else {
      compensation_[j] += (term - sum) + moments_[j];
    }
    moments_[j] = sum;
    term *= n;
  }
  ++count_;
  last_value_ = y;
  if (has_shape()) {
    refresh_shape();
  }
}

void GrowingWindow::refresh_shape() {
  const std::size_t last = count_ - 1;
  power_coeffs(last, degree_, coeff_scratch_);
  shape_.last_index = last;
  std::size_t offset = 0;
  for (int k = 0; k <= degree_; ++k) {
    long double acc = 0;
    for (int j = 0; j <= k; ++j) {
      const std::size_t uj = static_cast<std::size_t>(j);
      acc += coeff_scratch_[offset + uj] * (moments_[uj] + compensation_[uj]);
    }
    offset += static_cast<std::size_t>(k) + 1;
    shape_.alpha[static_cast<std::size_t>(k)] = static_cast<double>(acc / norm_of<long double>(k, last));
  }
}

const ShapeVector& GrowingWindow::shape() const {
  if (!has_shape()) {
    throw InsufficientData("window holds " + std::to_string(count_) + " points, degree " + std::to_string(degree_) +
                           " needs " + std::to_string(degree_ + 1));
  }
  return shape_;
}

std::vector<long double> GrowingWindow::moments() const {
  std::vector<long double> out(moments_.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = moments_[j] + compensation_[j];
  }
  return out;
}

double GrowingWindow::predicted_last() const {
  const ShapeVector& s = shape();
  long double values[kMaxDegree + 1];
  recurrence_values<long double>(s.last_index, degree_, static_cast<long double>(s.last_index), values);
  long double sum = 0;
  for (int k = 0; k <= degree_; ++k) {
    sum += s.alpha[static_cast<std::size_t>(k)] * values[k];
  }
  return static_cast<double>(sum);
}

}  // namespace fcpd
