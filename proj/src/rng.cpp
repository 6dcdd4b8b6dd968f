#include "dualobs/rng.hpp"

#include <algorithm>

namespace dualobs {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b)
{
    return splitmix64(splitmix64(splitmix64(root) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

DiscreteSampler::DiscreteSampler(std::span<const double> pmf) : cdf_(pmf.size())
{
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc += pmf[i];
        cdf_[i] = acc;
    }
    if (!cdf_.empty()) cdf_.back() = 1.0;
}

std::size_t DiscreteSampler::operator()(Rng& rng) const
{
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return cdf_.size() - 1;
    return static_cast<std::size_t>(it - cdf_.begin());
}

}  // namespace dualobs
