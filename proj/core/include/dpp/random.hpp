#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace dpp {

// Counter-based random stream keyed by (seed, index). Stream i of a seed
// produces the same numbers no matter which thread draws it or when, which
// keeps Monte Carlo results independent of the worker count.
class TrialStream {
public:
    using result_type = std::uint64_t;

    TrialStream(std::uint64_t seed, std::uint64_t index) noexcept;

    result_type operator()() noexcept;

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Inverse-CDF sampler for Binomial(n, p) over a precomputed table.
class BinomialSampler {
public:
    BinomialSampler(int n, double p);

    int operator()(double u) const noexcept;
    int operator()(TrialStream& stream) const noexcept { return (*this)(stream.uniform()); }

    int size() const noexcept { return n_; }
    double probability() const noexcept { return p_; }

private:
    int n_;
    double p_;
    std::vector<double> cdf_;
};

}  // namespace dpp
