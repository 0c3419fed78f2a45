#include "upsr/random.hpp"

#include <cmath>

#include "upsr/errors.hpp"
#include "upsr/upsilon.hpp"

namespace upsr {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
    std::seed_seq seq{
        static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
        static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
    };
    return std::mt19937_64(seq);
}

} // namespace

RngStream::RngStream(std::uint64_t seed) : engine_(seeded_engine(seed, 0)) {}

RngStream RngStream::derive(std::uint64_t seed, std::uint64_t stream) {
    RngStream out(0);
    out.engine_ = seeded_engine(seed, stream + 1);
    return out;
}

double RngStream::chi_square(double dof) {
    return std::chi_squared_distribution<double>(dof)(engine_);
}

double draw_upsilon(const UpsilonParams& params, RngStream& rng) {
    double y = rng.normal();
    for (std::size_t j = 0; j < params.size(); ++j) {
        const double nu = params.dof()[j];
        y += params.coef()[j] * std::sqrt(rng.chi_square(nu) / nu);
    }
    return y;
}

std::vector<double> sample_upsilon(const UpsilonParams& params, RngStream& rng, std::size_t n) {
    std::vector<std::chi_squared_distribution<double>> chis;
    chis.reserve(params.size());
    for (double nu : params.dof()) {
        chis.emplace_back(nu);
    }
    std::vector<double> out(n);
    for (auto& y : out) {
        double v = rng.normal();
        for (std::size_t j = 0; j < chis.size(); ++j) {
            v += params.coef()[j] * std::sqrt(chis[j](rng.engine()) / params.dof()[j]);
        }
        y = v;
    }
    return out;
}

} // namespace upsr
