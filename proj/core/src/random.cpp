#include "dpp/random.hpp"

#include <algorithm>

#include "dpp/borrowing.hpp"

namespace dpp {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t index) noexcept
    : key_(mix64(mix64(seed + kGolden) ^ (index * kGolden + 0x632be59bd9b4e019ULL))) {}

TrialStream::result_type TrialStream::operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double TrialStream::uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

BinomialSampler::BinomialSampler(int n, double p) : n_(n), p_(p) {
    const auto pmf = binomial_pmf_table(n, p);
    cdf_.resize(pmf.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        acc += pmf[k];
        cdf_[k] = acc;
    }
    cdf_.back() = 1.0;
}

int BinomialSampler::operator()(double u) const noexcept {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(), n_));
}

}  // namespace dpp
