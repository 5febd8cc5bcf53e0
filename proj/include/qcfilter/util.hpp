#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace qcf {

// Compensated accumulator (Kahan-Babuska). Keeps n-term sums at O(eps)
// instead of O(n*eps); the frequency-domain sequence sums rely on this.
class KahanSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Fixed-order pairwise reduction; result is independent of how callers
// might partition work across threads as long as indices are contiguous.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        KahanSum s;
        for (double x : v) s.add(x);
        return s.value();
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(std::span<const double>(v));
}

}  // namespace qcf
