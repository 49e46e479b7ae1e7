#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace cascade {

// Mean / standard-error accumulator for long correlated streams. Keeps up to
// 64 equal-size batches, doubling the batch size when full, so the standard
// error estimate stays honest in the presence of autocorrelation.
class BatchMeans {
 public:
  void add(double x) {
    total_sum_ += x;
    ++total_count_;
    current_sum_ += x;
    if (++current_count_ == batch_size_) {
      means_[filled_++] = current_sum_ / static_cast<double>(batch_size_);
      current_sum_ = 0.0;
      current_count_ = 0;
      if (filled_ == kMaxBatches) compact();
    }
  }

  std::uint64_t count() const { return total_count_; }

  double mean() const {
    return total_count_ == 0 ? 0.0 : static_cast<double>(total_sum_ / total_count_);
  }

  // Standard error of the mean from complete batches; 0 with fewer than two.
  double stderr_mean() const {
    if (filled_ < 2) return 0.0;
    double m = 0.0;
    for (int i = 0; i < filled_; ++i) m += means_[i];
    m /= filled_;
    double ss = 0.0;
    for (int i = 0; i < filled_; ++i) ss += (means_[i] - m) * (means_[i] - m);
    return std::sqrt(ss / (filled_ - 1) / filled_);
  }

  int batches() const { return filled_; }

 private:
  static constexpr int kMaxBatches = 64;

  void compact() {
    for (int i = 0; i < kMaxBatches / 2; ++i)
      means_[i] = 0.5 * (means_[2 * i] + means_[2 * i + 1]);
    filled_ = kMaxBatches / 2;
    batch_size_ *= 2;
  }

  std::array<double, kMaxBatches> means_{};
  long double total_sum_ = 0.0L;
  std::uint64_t total_count_ = 0;
  double current_sum_ = 0.0;
  std::uint64_t current_count_ = 0;
  std::uint64_t batch_size_ = 1;
  int filled_ = 0;
};

// Plain running mean/variance (Welford).
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }
  double stderr_mean() const {
    return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace cascade
