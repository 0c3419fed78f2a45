#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace upsr {

class UpsilonParams;

/// A seedable random stream. Independent streams are derived from a (seed, stream id)
/// pair, so work split across threads draws the same numbers regardless of scheduling.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    /// Stream `stream` of the family rooted at `seed`.
    static RngStream derive(std::uint64_t seed, std::uint64_t stream);

    double normal() { return normal_(engine_); }
    /// Chi-square draw; real-valued dof accepted.
    double chi_square(double dof);
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

/// Exact draws from an Upsilon law.
std::vector<double> sample_upsilon(const UpsilonParams& params, RngStream& rng, std::size_t n);

/// Single exact draw.
double draw_upsilon(const UpsilonParams& params, RngStream& rng);

} // namespace upsr
