#include "upsr/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "upsr/errors.hpp"
#include "upsr/estimation.hpp"
#include "upsr/random.hpp"

namespace upsr {

namespace {

constexpr std::size_t kChunk = std::size_t{1} << 16;
// Streams reserved for plan-level fixtures (designs), disjoint from replication ids.
constexpr std::uint64_t kFixtureStream = std::uint64_t{1} << 62;

unsigned resolve_threads(unsigned threads, std::size_t work) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(work, 1)));
}

// Run fn(i) for i in [0, count) on `threads` workers, rethrowing the first failure.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads, count);
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += threads) {
                    fn(i);
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

std::vector<double> gaussian_returns(RngStream& rng, std::size_t n, double mean, double sd) {
    std::vector<double> x(n);
    for (auto& v : x) {
        v = mean + sd * rng.normal();
    }
    return x;
}

SRSummary simulate_sr(RngStream& rng, std::size_t n, double snr, double sigma) {
    return compute_sr({gaussian_returns(rng, n, snr * sigma, sigma), 0.0});
}

// Fixed design: intercept plus p - 1 standard normal columns.
Eigen::MatrixXd fixture_design(std::uint64_t seed, std::uint64_t id, std::size_t n, std::size_t p) {
    RngStream rng = RngStream::derive(seed, kFixtureStream + id);
    Eigen::MatrixXd F(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < F.rows(); ++i) {
        F(i, 0) = 1.0;
        for (Eigen::Index j = 1; j < F.cols(); ++j) {
            F(i, j) = rng.normal();
        }
    }
    return F;
}

FactorSRSummary simulate_factor_sr(RngStream& rng, const Eigen::MatrixXd& F, double snr, double sigma) {
    Eigen::VectorXd beta(F.cols());
    beta(0) = snr * sigma;
    for (Eigen::Index j = 1; j < F.cols(); ++j) {
        beta(j) = 0.01 * static_cast<double>(j);
    }
    FactorSample s;
    s.factors = F;
    s.returns = F * beta;
    for (Eigen::Index i = 0; i < s.returns.size(); ++i) {
        s.returns(i) += sigma * rng.normal();
    }
    s.direction = Eigen::VectorXd::Unit(F.cols(), 0);
    return compute_factor_sr(s);
}

bool covers(const Interval& iv, double x) { return iv.lo <= x && x <= iv.hi; }

using Replicate = std::function<bool(RngStream&)>;
using ProcedureFactory = std::function<Replicate(const SimulationPlan&)>;

const std::map<std::string, ProcedureFactory>& registry() {
    static const std::map<std::string, ProcedureFactory> reg = {
        {"sr_ci",
         [](const SimulationPlan& plan) -> Replicate {
             return [&plan](RngStream& rng) {
                 const auto s = simulate_sr(rng, plan.sizes.at(0), plan.snr, plan.sigma);
                 return covers(sr_confidence_interval(s, plan.alpha, plan.order), plan.snr);
             };
         }},
        {"factor_sr_ci",
         [](const SimulationPlan& plan) -> Replicate {
             auto F = fixture_design(plan.seed, 0, plan.sizes.at(0), plan.factors);
             return [&plan, F = std::move(F)](RngStream& rng) {
                 const auto s = simulate_factor_sr(rng, F, plan.snr, plan.sigma);
                 return covers(factor_sr_confidence_interval(s, plan.alpha, plan.order), plan.snr);
             };
         }},
        {"one_sample_size",
         [](const SimulationPlan& plan) -> Replicate {
             return [&plan](RngStream& rng) {
                 const auto s = simulate_sr(rng, plan.sizes.at(0), plan.snr, plan.sigma);
                 return one_sample_test(s, plan.snr, plan.alpha, plan.sided, plan.order).reject;
             };
         }},
        {"two_sample_size",
         [](const SimulationPlan& plan) -> Replicate {
             return [&plan](RngStream& rng) {
                 const SRSummary s[2] = {simulate_sr(rng, plan.sizes.at(0), plan.snr, plan.sigma),
                                         simulate_sr(rng, plan.sizes.at(1), plan.snr, plan.sigma)};
                 const LinearHypothesis hyp{{1.0, -1.0}, 0.0, plan.alpha, plan.sided};
                 return k_sample_test(s, hyp, plan.order).reject;
             };
         }},
        {"factor_two_sample_size",
         [](const SimulationPlan& plan) -> Replicate {
             auto F1 = fixture_design(plan.seed, 1, plan.sizes.at(0), plan.factors);
             auto F2 = fixture_design(plan.seed, 2, plan.sizes.at(1), plan.factors);
             return [&plan, F1 = std::move(F1), F2 = std::move(F2)](RngStream& rng) {
                 const FactorSRSummary s[2] = {simulate_factor_sr(rng, F1, plan.snr, plan.sigma),
                                               simulate_factor_sr(rng, F2, plan.snr, plan.sigma)};
                 const LinearHypothesis hyp{{1.0, -1.0}, 0.0, plan.alpha, plan.sided};
                 return factor_k_sample_test(s, hyp, plan.order).reject;
             };
         }},
        {"sr_predint",
         [](const SimulationPlan& plan) -> Replicate {
             return [&plan](RngStream& rng) {
                 const auto past = simulate_sr(rng, plan.sizes.at(0), plan.snr, plan.sigma);
                 const auto future = simulate_sr(rng, plan.future_n, plan.snr, plan.sigma);
                 return covers(sr_prediction_interval(past, plan.future_n, plan.alpha, plan.order), future.sr);
             };
         }},
        {"bayes_credint",
         [](const SimulationPlan& plan) -> Replicate {
             return [&plan](RngStream& rng) {
                 // Draw the truth from the prior, then data given the truth.
                 const NIGHyper& h = plan.prior;
                 const double sigsq = h.m * h.sigsq / rng.chi_square(h.m);
                 const double sigma = std::sqrt(sigsq);
                 const double mu = h.mu + sigma / std::sqrt(h.n) * rng.normal();
                 const auto data = sample_moments(gaussian_returns(rng, plan.sizes.at(0), mu, sigma));
                 const auto post = update_nig(h, data);
                 return covers(credible_interval(post, plan.alpha, plan.order), mu / sigma);
             };
         }},
        {"bayes_predint",
         [](const SimulationPlan& plan) -> Replicate {
             const Interval iv = posterior_prediction_interval(plan.prior, plan.future_n, plan.alpha, plan.order);
             return [&plan, iv](RngStream& rng) {
                 const NIGHyper& h = plan.prior;
                 const double sigsq = h.m * h.sigsq / rng.chi_square(h.m);
                 const double sigma = std::sqrt(sigsq);
                 const double mu = h.mu + sigma / std::sqrt(h.n) * rng.normal();
                 const auto future = compute_sr({gaussian_returns(rng, plan.future_n, mu, sigma), 0.0});
                 return covers(iv, future.sr);
             };
         }},
    };
    return reg;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) {
            throw std::invalid_argument(v);
        }
        return x;
    } catch (const std::exception&) {
        throw ConfigError("plan key '" + key + "': expected a number, got '" + v + "'");
    }
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const auto x = std::stoull(v, &pos);
        if (pos != v.size() || v.front() == '-') {
            throw std::invalid_argument(v);
        }
        return x;
    } catch (const std::exception&) {
        throw ConfigError("plan key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    }
}

} // namespace

std::vector<double> empirical_cdf(const UpsilonParams& params, std::span<const double> points, std::size_t n,
                                  std::uint64_t seed, unsigned threads) {
    if (n == 0) {
        throw DomainError("empirical_cdf: need at least one draw");
    }
    std::vector<double> sorted(points.begin(), points.end());
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted[i] = points[order[i]];
    }

    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    // bins[c][j] counts draws of chunk c falling in (sorted[j-1], sorted[j]].
    std::vector<std::vector<std::size_t>> bins(chunks, std::vector<std::size_t>(sorted.size() + 1, 0));
    parallel_for(chunks, threads, [&](std::size_t c) {
        RngStream rng = RngStream::derive(seed, c);
        const std::size_t count = std::min(kChunk, n - c * kChunk);
        for (double y : sample_upsilon(params, rng, count)) {
            const auto j = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), y) - sorted.begin());
            ++bins[c][j];
        }
    });

    std::vector<std::size_t> total(sorted.size() + 1, 0);
    for (const auto& b : bins) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            total[j] += b[j];
        }
    }
    std::vector<double> out(points.size());
    std::size_t cum = 0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cum += total[j];
        out[order[j]] = static_cast<double>(cum) / static_cast<double>(n);
    }
    return out;
}

void SimulationPlan::validate(const std::string& proc) const {
    if (!registry().contains(proc)) {
        std::string names;
        for (const auto& name : registered_procedures()) {
            names += (names.empty() ? "" : ", ") + name;
        }
        throw ConfigError("unknown procedure '" + proc + "' (known: " + names + ")");
    }
    if (replications < 1) {
        throw ConfigError("plan needs at least one replication");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("plan alpha must lie in (0, 1)");
    }
    if (!(sigma > 0.0)) {
        throw ConfigError("plan sigma must be positive");
    }
    const bool two = proc == "two_sample_size" || proc == "factor_two_sample_size";
    const bool bayes_pred = proc == "bayes_predint";
    if (!bayes_pred && sizes.size() < (two ? 2u : 1u)) {
        throw ConfigError("procedure '" + proc + "' needs " + (two ? "two sample sizes" : "a sample size"));
    }
    const std::size_t min_n = (proc.rfind("factor", 0) == 0) ? factors + 1 : 2;
    for (auto n : sizes) {
        if (n < min_n) {
            throw ConfigError("plan sample sizes must be at least " + std::to_string(min_n));
        }
    }
    if ((proc == "sr_predint" || bayes_pred) && future_n < 2) {
        throw ConfigError("procedure '" + proc + "' needs n2 >= 2");
    }
    if ((proc == "bayes_credint" || bayes_pred) && !prior.proper()) {
        throw ConfigError("procedure '" + proc + "' needs a proper prior (prior.n, prior.m, prior.sigsq > 0)");
    }
    if (factors < 1) {
        throw ConfigError("plan needs p >= 1");
    }
}

SimulationPlan parse_plan(std::istream& in) {
    SimulationPlan plan;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("plan line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "scenario") {
            plan.scenario = value;
        } else if (key == "procedure") {
            plan.procedure = value;
        } else if (key == "replications") {
            plan.replications = parse_count(key, value);
        } else if (key == "seed") {
            plan.seed = parse_count(key, value);
        } else if (key == "snr") {
            plan.snr = parse_double(key, value);
        } else if (key == "sigma") {
            plan.sigma = parse_double(key, value);
        } else if (key == "n") {
            plan.sizes.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                plan.sizes.push_back(parse_count(key, trim(item)));
            }
        } else if (key == "n2") {
            plan.future_n = parse_count(key, value);
        } else if (key == "p") {
            plan.factors = parse_count(key, value);
        } else if (key == "alpha") {
            plan.alpha = parse_double(key, value);
        } else if (key == "sided") {
            try {
                plan.sided = parse_sided(value);
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
        } else if (key == "prior.mu") {
            plan.prior.mu = parse_double(key, value);
        } else if (key == "prior.n") {
            plan.prior.n = parse_double(key, value);
        } else if (key == "prior.sigsq") {
            plan.prior.sigsq = parse_double(key, value);
        } else if (key == "prior.m") {
            plan.prior.m = parse_double(key, value);
        } else if (key == "terms") {
            plan.order.edgeworth_terms = static_cast<int>(parse_count(key, value));
        } else if (key == "cf_terms") {
            plan.order.cf_terms = static_cast<int>(parse_count(key, value));
        } else if (key == "threads") {
            plan.threads = static_cast<unsigned>(parse_count(key, value));
        } else {
            throw ConfigError("plan line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    return plan;
}

SimulationPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open plan file '" + path + "'");
    }
    return parse_plan(in);
}

const std::vector<std::string>& registered_procedures() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, _] : registry()) {
            v.push_back(name);
        }
        return v;
    }();
    return names;
}

CoverageResult coverage_sim(const SimulationPlan& plan, const std::string& procedure) {
    plan.validate(procedure);
    const Replicate replicate = registry().at(procedure)(plan);
    std::vector<char> hit(plan.replications, 0);
    parallel_for(plan.replications, plan.threads, [&](std::size_t r) {
        RngStream rng = RngStream::derive(plan.seed, r);
        hit[r] = replicate(rng) ? 1 : 0;
    });
    CoverageResult out;
    out.scenario = plan.scenario;
    out.procedure = procedure;
    out.replications = plan.replications;
    for (char h : hit) {
        out.hits += static_cast<std::size_t>(h);
    }
    out.rate = static_cast<double>(out.hits) / static_cast<double>(out.replications);
    out.std_error = std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(out.replications));
    return out;
}

CoverageResult coverage_sim(const SimulationPlan& plan) {
    if (plan.procedure.empty()) {
        throw ConfigError("plan does not name a procedure");
    }
    return coverage_sim(plan, plan.procedure);
}

} // namespace upsr
