#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "upsr/bayes.hpp"
#include "upsr/frequentist.hpp"
#include "upsr/upsilon.hpp"

namespace upsr {

/// Fraction of exact Upsilon draws at or below each point. Draws are generated in fixed
/// chunks, chunk c from stream (seed, c), so the result does not depend on `threads`
/// (0 = hardware concurrency).
std::vector<double> empirical_cdf(const UpsilonParams& params, std::span<const double> points, std::size_t n,
                                  std::uint64_t seed, unsigned threads = 0);

/// A reproducible coverage or size experiment under Gaussian returns.
struct SimulationPlan {
    std::string scenario = "unnamed";
    std::string procedure;
    std::size_t replications = 10000;
    std::uint64_t seed = 1;
    double snr = 0.0;                ///< true per-period SNR of every simulated series
    double sigma = 0.05;             ///< volatility of simulated returns
    std::vector<std::size_t> sizes;  ///< sample size(s); two entries for two-sample plans
    std::size_t future_n = 0;        ///< future sample size for prediction plans
    std::size_t factors = 1;         ///< p, including the intercept, for factor plans
    double alpha = 0.05;
    Sided sided = Sided::two;
    NIGHyper prior;                  ///< prior (bayes_credint) or posterior (bayes_predint)
    ApproxOrder order;
    unsigned threads = 0;

    /// Throws ConfigError if the plan cannot run `procedure`.
    void validate(const std::string& procedure) const;
};

/// Parse `key = value` lines; `#` starts a comment. Unknown keys raise ConfigError.
SimulationPlan parse_plan(std::istream& in);
SimulationPlan load_plan(const std::string& path);

struct CoverageResult {
    std::string scenario;
    std::string procedure;
    std::size_t replications = 0;
    std::size_t hits = 0;
    double rate = 0.0;
    double std_error = 0.0;  ///< binomial standard error of `rate`
};

/// Names accepted by coverage_sim.
const std::vector<std::string>& registered_procedures();

/// Replicate the plan. Interval procedures report the fraction of replications whose
/// interval covers its target; test procedures report the rejection rate under H0.
/// Replication r draws from stream (seed, r); results are reduced in replication order.
CoverageResult coverage_sim(const SimulationPlan& plan, const std::string& procedure);
CoverageResult coverage_sim(const SimulationPlan& plan);

} // namespace upsr
