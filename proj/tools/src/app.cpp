#include "upsr_cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <regex>
#include <sstream>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <Eigen/Dense>

#include "upsr/bayes.hpp"
#include "upsr/errors.hpp"
#include "upsr/estimation.hpp"
#include "upsr/frequentist.hpp"
#include "upsr/montecarlo.hpp"
#include "upsr/random.hpp"
#include "upsr/upsilon.hpp"
#include "upsr_cli/csv.hpp"
#include "upsr_cli/report.hpp"

namespace upsr::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    if (trim(text).empty()) {
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(trim(item));
    }
    if (!text.empty() && text.back() == ',') {
        out.emplace_back();
    }
    return out;
}

} // namespace

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    for (const auto& item : split_commas(text)) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (item.empty() || pos != item.size() || !std::isfinite(v)) {
            throw UsageError(flag + ": '" + item + "' is not a finite number in list '" + text + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> parse_counts(const std::string& text, const std::string& flag) {
    std::vector<std::size_t> out;
    for (double v : parse_list(text, flag)) {
        if (!(v >= 1.0) || v != std::floor(v) || v > 1e15) {
            throw UsageError(flag + ": counts must be positive integers, got " + format_number(v));
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag) {
        return *flag;
    }
    const char* env = std::getenv(kSeedEnv);
    if (env == nullptr || *env == '\0') {
        return kDefaultSeed;
    }
    const std::string s = trim(env);
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw UsageError(std::string(kSeedEnv) + " must be a nonnegative integer, got '" + env + "'");
    }
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw UsageError(std::string(kSeedEnv) + " is out of range: '" + env + "'");
    }
}

namespace {

// ---- shared option groups -------------------------------------------------

struct OrderOpts {
    int terms = 0;
    int edgeworth = 0;
    int cf = 0;
    CLI::Option* terms_opt = nullptr;
    CLI::Option* edgeworth_opt = nullptr;
    CLI::Option* cf_opt = nullptr;

    void add(CLI::App* cmd, const std::string& terms_help) {
        terms_opt = cmd->add_option("--terms", terms, terms_help)->check(CLI::Range(1, kMaxSeriesTerms));
        edgeworth_opt = cmd->add_option("--edgeworth-terms", edgeworth, "Edgeworth correction terms (default 8)")
                            ->check(CLI::Range(1, kMaxSeriesTerms));
        cf_opt = cmd->add_option("--cf-terms", cf, "Cornish-Fisher correction terms (default 6)")
                     ->check(CLI::Range(1, kMaxSeriesTerms));
    }

    // `primary` picks which series --terms sets; nullptr means both.
    ApproxOrder resolve(int ApproxOrder::*primary = nullptr) const {
        ApproxOrder o;
        if (terms_opt->count() > 0) {
            if (primary != nullptr) {
                o.*primary = terms;
            } else {
                o.edgeworth_terms = terms;
                o.cf_terms = terms;
            }
        }
        if (edgeworth_opt->count() > 0) {
            o.edgeworth_terms = edgeworth;
        }
        if (cf_opt->count() > 0) {
            o.cf_terms = cf;
        }
        return o;
    }
};

struct DataOpts {
    std::string csv;
    std::vector<std::string> columns;
    std::vector<std::string> factors;
    std::string direction;
    int split_month = 0;
    bool percent = false;
    bool header = false;
    bool no_header = false;
    int date_column = -1;
    double rfr = 0.0;
    CLI::Option* csv_opt = nullptr;
    CLI::Option* split_opt = nullptr;
    CLI::Option* date_opt = nullptr;
    CLI::Option* direction_opt = nullptr;

    void add(CLI::App* cmd, bool with_factors) {
        csv_opt = cmd->add_option("--csv", csv, "returns file (comma-separated)");
        cmd->add_option("--column", columns, "return column(s) by name or 0-based index among numeric columns")
            ->delimiter(',');
        if (with_factors) {
            cmd->add_option("--factors", factors, "factor columns; an intercept is always added")->delimiter(',');
            direction_opt = cmd->add_option("--direction", direction,
                                            "contrast on (intercept, factors...); default picks the intercept");
        }
        split_opt = cmd->add_option("--split-month", split_month,
                                    "split one column into rows dated in this month and all other rows")
                        ->check(CLI::Range(1, 12));
        cmd->add_flag("--percent", percent, "returns in the file are in percent; divide by 100");
        auto* h = cmd->add_flag("--header", header, "first row is a header");
        auto* nh = cmd->add_flag("--no-header", no_header, "first row is data");
        h->excludes(nh);
        date_opt = cmd->add_option("--date-column", date_column, "0-based date column, -1 for none");
        cmd->add_option("--rfr", rfr, "per-period risk-free rate, decimal");
    }

    bool given() const { return csv_opt->count() > 0; }

    ReturnsTable table() const {
        CsvOptions o;
        if (header) {
            o.header = true;
        }
        if (no_header) {
            o.header = false;
        }
        if (date_opt->count() > 0) {
            o.date_column = date_column;
        }
        o.percent = percent;
        return read_returns_file(csv, o);
    }

    Json describe() const {
        Json j;
        j["file"] = csv;
        j["columns"] = columns;
        if (!factors.empty()) {
            j["factors"] = factors;
        }
        if (split_opt->count() > 0) {
            j["split_month"] = split_month;
        }
        j["percent"] = percent;
        j["rfr"] = rfr;
        return j;
    }
};

// A sample drawn from the file: its returns and, for factor work, its design rows.
struct RawSample {
    std::string label;
    std::vector<double> returns;
    Eigen::MatrixXd design;
};

std::vector<RawSample> load_samples(const DataOpts& d, bool factor_design) {
    const auto table = d.table();
    std::vector<std::string> cols = d.columns;
    if (cols.empty()) {
        cols.push_back(table.names.front());
    }
    std::vector<std::size_t> factor_idx;
    for (const auto& f : d.factors) {
        factor_idx.push_back(table.index_of(f));
    }
    const std::size_t rows = table.rows();
    auto design_row = [&](Eigen::MatrixXd& F, Eigen::Index r, std::size_t src) {
        F(r, 0) = 1.0;
        for (std::size_t j = 0; j < factor_idx.size(); ++j) {
            F(r, static_cast<Eigen::Index>(j + 1)) = table.columns[factor_idx[j]][src];
        }
    };
    auto make = [&](const std::string& label, std::size_t col, const std::vector<std::size_t>& pick) {
        RawSample s;
        s.label = label;
        for (std::size_t r : pick) {
            s.returns.push_back(table.columns[col][r]);
        }
        if (factor_design) {
            s.design.resize(static_cast<Eigen::Index>(pick.size()), static_cast<Eigen::Index>(factor_idx.size() + 1));
            for (std::size_t i = 0; i < pick.size(); ++i) {
                design_row(s.design, static_cast<Eigen::Index>(i), pick[i]);
            }
        }
        return s;
    };

    std::vector<RawSample> out;
    if (d.split_opt->count() > 0) {
        if (cols.size() != 1) {
            throw UsageError("--split-month takes exactly one --column");
        }
        if (table.dates.empty()) {
            throw UsageError("--split-month needs a date column in the returns file");
        }
        std::vector<std::size_t> in, rest;
        for (std::size_t r = 0; r < rows; ++r) {
            (iso_month(table.dates[r]) == d.split_month ? in : rest).push_back(r);
        }
        const auto col = table.index_of(cols.front());
        out.push_back(make(table.names[col] + " month " + std::to_string(d.split_month), col, in));
        out.push_back(make(table.names[col] + " other months", col, rest));
        return out;
    }
    std::vector<std::size_t> all(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        all[r] = r;
    }
    for (const auto& c : cols) {
        const auto col = table.index_of(c);
        out.push_back(make(table.names[col], col, all));
    }
    return out;
}

Eigen::VectorXd direction_for(const DataOpts& d, Eigen::Index p) {
    if (d.direction_opt != nullptr && d.direction_opt->count() > 0) {
        const auto v = parse_list(d.direction, "--direction");
        if (static_cast<Eigen::Index>(v.size()) != p) {
            throw UsageError("--direction needs " + std::to_string(p) + " entries (intercept plus factors)");
        }
        return Eigen::Map<const Eigen::VectorXd>(v.data(), p);
    }
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
    e(0) = 1.0;
    return e;
}

FactorSample factor_sample(const DataOpts& d, const RawSample& s) {
    FactorSample f;
    f.factors = s.design;
    f.returns = Eigen::Map<const Eigen::VectorXd>(s.returns.data(), static_cast<Eigen::Index>(s.returns.size()));
    f.direction = direction_for(d, f.factors.cols());
    f.rfr = d.rfr;
    return f;
}

// ---- summary-mode flags ---------------------------------------------------

struct SummaryOpts {
    std::string sr;
    std::string n;
    std::string gram;
    std::string p_count;
    CLI::Option* sr_opt = nullptr;
    CLI::Option* n_opt = nullptr;
    CLI::Option* gram_opt = nullptr;
    CLI::Option* p_opt = nullptr;

    void add(CLI::App* cmd, bool with_factor) {
        sr_opt = cmd->add_option("--sr", sr, "Sharpe ratio(s) per sqrt(period), comma-separated");
        n_opt = cmd->add_option("--n", n, "sample size(s), comma-separated");
        if (with_factor) {
            gram_opt = cmd->add_option("--gram", gram, "gram scalar(s) v'(F'F)^{-1}v");
            p_opt = cmd->add_option("--p-count", p_count, "regressor count(s) including the intercept");
        }
    }

    bool given() const {
        return sr_opt->count() > 0 || n_opt->count() > 0 || (gram_opt != nullptr && gram_opt->count() > 0) ||
               (p_opt != nullptr && p_opt->count() > 0);
    }

    std::vector<SRSummary> plain() const {
        const auto s = parse_list(sr, "--sr");
        const auto k = parse_counts(n, "--n");
        if (s.empty() || s.size() != k.size()) {
            throw UsageError("--sr and --n need the same, nonzero number of entries");
        }
        std::vector<SRSummary> out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            out.push_back({s[i], k[i]});
        }
        return out;
    }

    std::vector<FactorSRSummary> factor() const {
        const auto s = parse_list(sr, "--sr");
        const auto k = parse_counts(n, "--n");
        const auto g = parse_list(gram, "--gram");
        const auto p = parse_counts(p_count, "--p-count");
        if (s.empty() || k.size() != s.size() || g.size() != s.size() || p.size() != s.size()) {
            throw UsageError("--sr, --n, --gram and --p-count need the same, nonzero number of entries");
        }
        std::vector<FactorSRSummary> out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            out.push_back({s[i], k[i], p[i], g[i]});
        }
        return out;
    }
};

void check_one_mode(const SummaryOpts& s, const DataOpts& d) {
    if (s.given() && d.given()) {
        throw UsageError("give either summary flags (--sr/--n/...) or --csv, not both");
    }
    if (!s.given() && !d.given()) {
        throw UsageError("no input: give summary flags (--sr/--n/...) or --csv");
    }
}

void check_alpha_flag(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw UsageError("--alpha must lie in (0, 1)");
    }
}

Json plain_json(const SRSummary& s) { return Json{{"sr", s.sr}, {"n", s.n}}; }

Json factor_json(const FactorSRSummary& s) {
    return Json{{"sr", s.srg}, {"n", s.n}, {"p", s.p}, {"gram", s.gram_scalar}};
}

void emit(const Json& report, bool json, std::ostream& out) {
    if (json) {
        out << report.dump(2) << '\n';
    } else {
        out << render_text(report);
    }
}

// ---- dist -----------------------------------------------------------------

struct DistCmd {
    std::string function;
    std::string coef;
    std::string df;
    OrderOpts order;
    std::string x;
    std::string p;
    std::size_t n = 1;
    std::uint64_t seed = 0;
    std::string method = "cf";
    int max_order = 8;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* x_opt = nullptr;
    CLI::Option* p_opt = nullptr;

    void add(CLI::App* app) {
        auto* cmd = app->add_subcommand("dist", "Upsilon distribution: cdf, pdf, quantile, cumulants, sample");
        cmd->add_option("function", function, "cdf | pdf | quantile | cumulants | sample")
            ->required()
            ->check(CLI::IsMember({"cdf", "pdf", "quantile", "cumulants", "sample"}));
        cmd->add_option("--coef", coef, "coefficients, comma-separated ('' for none)")->expected(0, 1);
        cmd->add_option("--df", df, "degrees of freedom, comma-separated ('' for none)")->expected(0, 1);
        order.add(cmd, "terms of the series behind the requested function");
        x_opt = cmd->add_option("--x", x, "evaluation point(s), comma-separated");
        p_opt = cmd->add_option("--p", p, "probabilities, comma-separated");
        cmd->add_option("--n", n, "number of draws")->check(CLI::PositiveNumber);
        seed_opt = cmd->add_option("--seed", seed, std::string("random seed (default $") + kSeedEnv + " or 1)");
        cmd->add_option("--method", method, "quantile method: cf (Cornish-Fisher) or refined (root of the CDF)")
            ->check(CLI::IsMember({"cf", "refined"}));
        cmd->add_option("--order", max_order, "highest cumulant order")->check(CLI::Range(2, 3 * kMaxSeriesTerms));
        cmd->callback([this] { ran = true; });
    }
    bool ran = false;

    Json execute() const {
        const auto c = parse_list(coef, "--coef");
        const auto d = parse_list(df, "--df");
        if (c.size() != d.size()) {
            throw UsageError("--coef has " + std::to_string(c.size()) + " entries but --df has " +
                             std::to_string(d.size()));
        }
        const UpsilonParams params(c, d);
        Json j;
        Json inputs;
        Json values = Json::array();
        ApproxOrder o;
        if (function == "cdf" || function == "pdf") {
            if (x_opt->count() == 0) {
                throw UsageError("dist " + function + " needs --x");
            }
            o = order.resolve(&ApproxOrder::edgeworth_terms);
            const auto xs = parse_list(x, "--x");
            const UpsilonApprox law(params, o);
            for (double v : xs) {
                values.push_back(function == "cdf" ? law.cdf(v) : law.pdf(v));
            }
            j["method"] = "edgeworth " + function;
            inputs["x"] = xs;
        } else if (function == "quantile") {
            if (p_opt->count() == 0) {
                throw UsageError("dist quantile needs --p");
            }
            const bool refined = method == "refined";
            o = order.resolve(refined ? &ApproxOrder::edgeworth_terms : &ApproxOrder::cf_terms);
            const auto ps = parse_list(p, "--p");
            for (double v : ps) {
                if (!(v > 0.0 && v < 1.0)) {
                    throw UsageError("--p entries must lie in (0, 1)");
                }
            }
            const UpsilonApprox law(params, o);
            for (double v : ps) {
                values.push_back(refined ? law.quantile(v) : law.cf_quantile(v));
            }
            j["method"] = refined ? "refined quantile (root of the edgeworth cdf)" : "cornish-fisher quantile";
            inputs["p"] = ps;
        } else if (function == "cumulants") {
            const auto k = upsilon_cumulants(params, max_order);
            for (double v : k.values()) {
                values.push_back(v);
            }
            j["method"] = "cumulants";
            inputs["order"] = max_order;
        } else {
            const auto s = resolve_seed(seed_opt->count() > 0 ? std::optional<std::uint64_t>(seed) : std::nullopt);
            RngStream rng(s);
            for (double v : sample_upsilon(params, rng, n)) {
                values.push_back(v);
            }
            j["method"] = "exact draws";
            inputs["n"] = n;
            j["inputs"] = inputs;
            j["values"] = values;
            j["params"] = to_json(params);
            j["seed"] = s;
            return j;
        }
        j["inputs"] = inputs;
        j["values"] = values;
        j["params"] = to_json(params);
        if (function != "cumulants") {
            j["terms"] = to_json(o);
        }
        return j;
    }
};

// ---- test -----------------------------------------------------------------

struct TestCmd {
    std::string kind;
    SummaryOpts summary;
    DataOpts data;
    OrderOpts order;
    std::string weights;
    double target = 0.0;
    double alpha = 0.05;
    std::string sided = "upper";
    CLI::Option* weights_opt = nullptr;
    bool ran = false;

    void add(CLI::App* app) {
        auto* cmd = app->add_subcommand("test", "Hypothesis tests on Sharpe ratios: one, ksample, factor");
        cmd->add_option("kind", kind, "one | ksample | factor")
            ->required()
            ->check(CLI::IsMember({"one", "ksample", "factor"}));
        summary.add(cmd, true);
        data.add(cmd, true);
        order.add(cmd, "terms of both series");
        weights_opt = cmd->add_option("--weights", weights, "contrast weights a (default 1 for one sample, 1,-1 for two)");
        cmd->add_option("--target,--snr0", target, "null value b of sum a_i zeta_i");
        cmd->add_option("--alpha", alpha, "test size");
        cmd->add_option("--sided", sided, "alternative: upper | lower | two")
            ->check(CLI::IsMember({"upper", "lower", "two"}));
        cmd->callback([this] { ran = true; });
    }

    std::vector<double> contrast(std::size_t k) const {
        if (weights_opt->count() > 0) {
            auto w = parse_list(weights, "--weights");
            if (w.size() != k) {
                throw UsageError("--weights needs " + std::to_string(k) + " entries, one per sample");
            }
            return w;
        }
        if (k == 1) {
            return {1.0};
        }
        if (k == 2) {
            return {1.0, -1.0};
        }
        throw UsageError("--weights is required with more than two samples");
    }

    Json execute() const {
        check_one_mode(summary, data);
        check_alpha_flag(alpha);
        const ApproxOrder o = order.resolve();
        const Sided side = parse_sided(sided);
        Json inputs;
        inputs["mode"] = data.given() ? "csv" : "summary";
        if (data.given()) {
            inputs["data"] = data.describe();
        }

        if (kind == "factor") {
            std::vector<FactorSRSummary> f;
            if (data.given()) {
                for (const auto& s : load_samples(data, true)) {
                    f.push_back(compute_factor_sr(factor_sample(data, s)));
                }
            } else {
                f = summary.factor();
            }
            Json samples = Json::array();
            for (const auto& s : f) {
                samples.push_back(factor_json(s));
            }
            inputs["samples"] = samples;
            const LinearHypothesis hyp{contrast(f.size()), target, alpha, side};
            inputs["weights"] = hyp.weights;
            inputs["target"] = target;
            return inference_report(factor_k_sample_test(f, hyp, o), inputs);
        }

        std::vector<SRSummary> s;
        if (data.given()) {
            for (const auto& raw : load_samples(data, false)) {
                s.push_back(compute_sr({raw.returns, data.rfr}));
            }
        } else {
            s = summary.plain();
        }
        Json samples = Json::array();
        for (const auto& v : s) {
            samples.push_back(plain_json(v));
        }
        inputs["samples"] = samples;
        if (kind == "one") {
            if (s.size() != 1) {
                throw UsageError("test one takes exactly one sample");
            }
            if (weights_opt->count() > 0) {
                throw UsageError("--weights does not apply to test one");
            }
            inputs["target"] = target;
            return inference_report(one_sample_test(s.front(), target, alpha, side, o), inputs);
        }
        const LinearHypothesis hyp{contrast(s.size()), target, alpha, side};
        inputs["weights"] = hyp.weights;
        inputs["target"] = target;
        return inference_report(k_sample_test(s, hyp, o), inputs);
    }
};

// ---- ci and predint -------------------------------------------------------

struct IntervalCmd {
    bool predictive = false;
    SummaryOpts summary;
    DataOpts data;
    OrderOpts order;
    double alpha = 0.05;
    bool factor = false;
    std::size_t n2 = 0;
    bool ran = false;

    void add(CLI::App* app, bool predint) {
        predictive = predint;
        auto* cmd = predint ? app->add_subcommand("predint", "prediction interval for a future Sharpe ratio")
                            : app->add_subcommand("ci", "confidence interval for the signal-noise ratio");
        summary.add(cmd, !predint);
        data.add(cmd, !predint);
        order.add(cmd, "terms of both series");
        cmd->add_option("--alpha", alpha, "1 - coverage");
        if (predint) {
            cmd->add_option("--n2", n2, "size of the future sample")->required()->check(CLI::Range(2ul, 1000000000ul));
        } else {
            cmd->add_flag("--factor", factor, "interval for the factor-model SNR");
        }
        cmd->callback([this] { ran = true; });
    }

    Json execute() const {
        check_one_mode(summary, data);
        check_alpha_flag(alpha);
        const ApproxOrder o = order.resolve();
        Json j;
        Json inputs;
        inputs["mode"] = data.given() ? "csv" : "summary";
        if (data.given()) {
            inputs["data"] = data.describe();
        }
        if (factor) {
            FactorSRSummary f;
            if (data.given()) {
                const auto s = load_samples(data, true);
                if (s.size() != 1) {
                    throw UsageError("ci takes exactly one sample");
                }
                f = compute_factor_sr(factor_sample(data, s.front()));
            } else {
                const auto all = summary.factor();
                if (all.size() != 1) {
                    throw UsageError("ci takes exactly one sample");
                }
                f = all.front();
            }
            inputs["sample"] = factor_json(f);
            const auto iv = factor_sr_confidence_interval(f, alpha, o);
            j["method"] = "factor snr confidence interval";
            j["inputs"] = inputs;
            j["statistic"] = f.srg;
            j["interval"] = to_json(iv);
            j["alpha"] = alpha;
            j["terms"] = to_json(o);
            return j;
        }
        if (summary.gram_opt != nullptr && (summary.gram_opt->count() > 0 || summary.p_opt->count() > 0)) {
            throw UsageError("--gram and --p-count need --factor");
        }
        SRSummary s;
        if (data.given()) {
            if (!data.factors.empty()) {
                throw UsageError("--factors needs --factor");
            }
            const auto raw = load_samples(data, false);
            if (raw.size() != 1) {
                throw UsageError("one sample expected");
            }
            s = compute_sr({raw.front().returns, data.rfr});
        } else {
            const auto all = summary.plain();
            if (all.size() != 1) {
                throw UsageError("one sample expected");
            }
            s = all.front();
        }
        inputs["sample"] = plain_json(s);
        if (predictive) {
            inputs["n2"] = n2;
            const auto iv = sr_prediction_interval(s, n2, alpha, o);
            j["method"] = "sharpe ratio prediction interval";
            j["inputs"] = inputs;
            j["statistic"] = s.sr;
            j["interval"] = to_json(iv);
            j["alpha"] = alpha;
            j["cdf_at_endpoints"] = Json{{"lo", prediction_cdf(s, n2, iv.lo, o)}, {"hi", prediction_cdf(s, n2, iv.hi, o)}};
        } else {
            const auto iv = sr_confidence_interval(s, alpha, o);
            j["method"] = "snr confidence interval";
            j["inputs"] = inputs;
            j["statistic"] = s.sr;
            j["interval"] = to_json(iv);
            j["alpha"] = alpha;
        }
        j["terms"] = to_json(o);
        return j;
    }
};

// ---- bayes ----------------------------------------------------------------

struct BayesCmd {
    std::string kind;
    NIGHyper prior;
    DataOpts data;
    OrderOpts order;
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
    double alpha = 0.05;
    std::size_t n2 = 0;
    std::string prior_file;
    CLI::Option* mean_opt = nullptr;
    CLI::Option* sd_opt = nullptr;
    CLI::Option* n_opt = nullptr;
    CLI::Option* n2_opt = nullptr;
    CLI::Option* prior_file_opt = nullptr;
    CLI::Option* prior_opts[4] = {};
    bool ran = false;

    void add(CLI::App* app) {
        auto* cmd = app->add_subcommand("bayes", "Normal-inverse-gamma analysis: update, credint, predint, regress");
        cmd->add_option("kind", kind, "update | credint | predint | regress")
            ->required()
            ->check(CLI::IsMember({"update", "credint", "predint", "regress"}));
        prior_opts[0] = cmd->add_option("--mu0", prior.mu, "prior location of the mean");
        prior_opts[1] = cmd->add_option("--n0", prior.n, "prior pseudo-count of the mean (0: flat)");
        prior_opts[2] = cmd->add_option("--sigsq0", prior.sigsq, "prior variance scale");
        prior_opts[3] = cmd->add_option("--m0", prior.m, "prior variance dof (0: flat)");
        data.add(cmd, true);
        mean_opt = cmd->add_option("--mean", mean, "sample mean return");
        sd_opt = cmd->add_option("--sd", sd, "sample standard deviation");
        n_opt = cmd->add_option("--n", n, "sample size");
        order.add(cmd, "terms of both series");
        cmd->add_option("--alpha", alpha, "1 - credibility");
        n2_opt = cmd->add_option("--n2", n2, "size of the future sample")->check(CLI::Range(2ul, 1000000000ul));
        prior_file_opt = cmd->add_option("--prior-file", prior_file,
                                         "JSON regression prior {beta, lambda, sigsq, m}; default flat");
        cmd->callback([this] { ran = true; });
    }

    bool summary_given() const { return mean_opt->count() + sd_opt->count() + n_opt->count() > 0; }

    RegressionHyper load_regression_prior(Eigen::Index p) const {
        if (prior_file_opt->count() == 0) {
            return RegressionHyper::noninformative(p);
        }
        std::ifstream in(prior_file);
        if (!in) {
            throw UsageError("cannot open prior file '" + prior_file + "'");
        }
        const auto j = nlohmann::json::parse(in);
        RegressionHyper h;
        const auto beta = j.at("beta").get<std::vector<double>>();
        const auto lambda = j.at("lambda").get<std::vector<std::vector<double>>>();
        if (static_cast<Eigen::Index>(beta.size()) != p || static_cast<Eigen::Index>(lambda.size()) != p) {
            throw UsageError("prior file: beta and lambda must have dimension " + std::to_string(p));
        }
        h.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), p);
        h.lambda.resize(p, p);
        for (Eigen::Index i = 0; i < p; ++i) {
            if (static_cast<Eigen::Index>(lambda[static_cast<std::size_t>(i)].size()) != p) {
                throw UsageError("prior file: lambda must be square");
            }
            for (Eigen::Index k = 0; k < p; ++k) {
                h.lambda(i, k) = lambda[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            }
        }
        h.sigsq = j.at("sigsq").get<double>();
        h.m = j.at("m").get<double>();
        return h;
    }

    Json regress(const ApproxOrder& o) const {
        if (!data.given()) {
            throw UsageError("bayes regress needs --csv");
        }
        if (summary_given()) {
            throw UsageError("bayes regress takes data from --csv only");
        }
        for (auto* opt : prior_opts) {
            if (opt->count() > 0) {
                throw UsageError("bayes regress takes its prior from --prior-file");
            }
        }
        const auto raw = load_samples(data, true);
        if (raw.size() != 1) {
            throw UsageError("bayes regress takes exactly one sample");
        }
        const auto sample = factor_sample(data, raw.front());
        const auto h0 = load_regression_prior(sample.factors.cols());
        const auto post = update_regression(h0, sample);
        const auto nig = collapse_direction(post, sample.direction);
        Json lambda = Json::array();
        for (Eigen::Index i = 0; i < post.lambda.rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(post.lambda.cols()));
            for (Eigen::Index k = 0; k < post.lambda.cols(); ++k) {
                row[static_cast<std::size_t>(k)] = post.lambda(i, k);
            }
            lambda.push_back(row);
        }
        Json j;
        j["method"] = "bayesian regression";
        Json inputs;
        inputs["data"] = data.describe();
        inputs["n"] = sample.returns.size();
        inputs["direction"] = std::vector<double>(sample.direction.data(), sample.direction.data() + sample.direction.size());
        inputs["prior"] = prior_file_opt->count() > 0 ? Json(prior_file) : Json("flat");
        j["inputs"] = inputs;
        j["posterior"] = Json{{"beta", std::vector<double>(post.beta.data(), post.beta.data() + post.beta.size())},
                              {"lambda", lambda},
                              {"sigsq", post.sigsq},
                              {"m", post.m}};
        j["collapsed"] = to_json(nig);
        const auto marg = marginal_snr_params(nig);
        j["interval"] = to_json(credible_interval(nig, alpha, o));
        j["alpha"] = alpha;
        j["params"] = to_json(marg.params);
        j["scale"] = marg.scale;
        j["terms"] = to_json(o);
        return j;
    }

    Json execute() const {
        check_alpha_flag(alpha);
        const ApproxOrder o = order.resolve();
        if (kind == "regress") {
            return regress(o);
        }
        if (prior_file_opt->count() > 0) {
            throw UsageError("--prior-file applies to bayes regress only");
        }
        if (data.given() && summary_given()) {
            throw UsageError("give either --mean/--sd/--n or --csv, not both");
        }
        if (!data.factors.empty()) {
            throw UsageError("--factors applies to bayes regress only");
        }
        Json inputs;
        inputs["prior"] = to_json(prior);
        SampleMoments m;
        if (data.given()) {
            const auto raw = load_samples(data, false);
            if (raw.size() != 1) {
                throw UsageError("one sample expected");
            }
            std::vector<double> excess = raw.front().returns;
            for (auto& v : excess) {
                v -= data.rfr;
            }
            m = sample_moments(excess);
            inputs["data"] = data.describe();
        } else if (summary_given()) {
            if (mean_opt->count() == 0 || sd_opt->count() == 0 || n_opt->count() == 0) {
                throw UsageError("--mean, --sd and --n go together");
            }
            m = {mean, sd, n};
        }
        inputs["sample"] = Json{{"mean", m.mean}, {"sd", m.sd}, {"n", m.n}};
        const NIGHyper post = update_nig(prior, m);
        Json j;
        if (kind == "update") {
            j["method"] = "normal-inverse-gamma update";
            j["inputs"] = inputs;
            j["posterior"] = to_json(post);
            if (post.sigsq > 0.0) {
                const auto s = to_snr_form(post);
                j["snr_form"] = Json{{"snr", s.snr}, {"n", s.n}, {"sigsq", s.sigsq}, {"m", s.m}};
            }
            return j;
        }
        if (kind == "credint") {
            const auto marg = marginal_snr_params(post);
            j["method"] = "snr credible interval";
            j["inputs"] = inputs;
            j["posterior"] = to_json(post);
            j["interval"] = to_json(credible_interval(post, alpha, o));
            j["alpha"] = alpha;
            j["params"] = to_json(marg.params);
            j["scale"] = marg.scale;
            j["terms"] = to_json(o);
            return j;
        }
        if (n2_opt->count() == 0) {
            throw UsageError("bayes predint needs --n2");
        }
        inputs["n2"] = n2;
        const auto iv = posterior_prediction_interval(post, n2, alpha, o);
        j["method"] = "posterior sharpe ratio prediction interval";
        j["inputs"] = inputs;
        j["posterior"] = to_json(post);
        j["interval"] = to_json(iv);
        j["alpha"] = alpha;
        j["cdf_at_endpoints"] = Json{{"lo", posterior_prediction_cdf(post, n2, iv.lo, o)},
                                     {"hi", posterior_prediction_cdf(post, n2, iv.hi, o)}};
        j["terms"] = to_json(o);
        return j;
    }
};

// ---- simulate -------------------------------------------------------------

struct SimulateCmd {
    std::string plan_file;
    std::string procedure;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    CLI::Option* procedure_opt = nullptr;
    CLI::Option* replications_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    bool ran = false;

    void add(CLI::App* app) {
        auto* cmd = app->add_subcommand("simulate", "run a coverage or size experiment from a plan file");
        cmd->add_option("--plan", plan_file, "plan file of key = value lines")->required();
        procedure_opt = cmd->add_option("--procedure", procedure, "override the plan's procedure");
        replications_opt =
            cmd->add_option("--replications", replications, "override the replication count")->check(CLI::PositiveNumber);
        seed_opt = cmd->add_option("--seed", seed, "override the seed (plan, then $UPSR_SEED, then 1)");
        threads_opt = cmd->add_option("--threads", threads, "worker threads, 0 for all cores");
        cmd->callback([this] { ran = true; });
    }

    Json execute() const {
        std::ifstream in(plan_file);
        if (!in) {
            throw ConfigError("cannot open plan file '" + plan_file + "'");
        }
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();
        std::istringstream is(text);
        SimulationPlan plan = parse_plan(is);
        static const std::regex seed_line(R"((^|\n)[ \t]*seed[ \t]*=)");
        const bool plan_seed = std::regex_search(text, seed_line);
        if (seed_opt->count() > 0) {
            plan.seed = seed;
        } else if (!plan_seed) {
            plan.seed = resolve_seed(std::nullopt);
        }
        if (procedure_opt->count() > 0) {
            plan.procedure = procedure;
        }
        if (replications_opt->count() > 0) {
            plan.replications = replications;
        }
        if (threads_opt->count() > 0) {
            plan.threads = threads;
        }
        const auto r = coverage_sim(plan);
        Json j;
        j["method"] = "coverage simulation";
        j["inputs"] = Json{{"plan", plan_file},
                           {"snr", plan.snr},
                           {"sigma", plan.sigma},
                           {"sizes", plan.sizes},
                           {"alpha", plan.alpha}};
        j["result"] = to_json(r);
        j["terms"] = to_json(plan.order);
        j["seed"] = plan.seed;
        return j;
    }
};

int failure(std::ostream& err, const char* kind, const std::exception& e, int code) {
    err << "upsr: " << kind << ": " << e.what() << '\n';
    return code;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sharpe ratio inference through the Upsilon distribution", "upsr"};
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "structured output");
    app.fallthrough();

    DistCmd dist;
    TestCmd test;
    IntervalCmd ci;
    IntervalCmd predint;
    BayesCmd bayes;
    SimulateCmd simulate;
    dist.add(&app);
    test.add(&app);
    ci.add(&app, false);
    predint.add(&app, true);
    bayes.add(&app);
    simulate.add(&app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        Json report;
        if (dist.ran) {
            report = dist.execute();
        } else if (test.ran) {
            report = test.execute();
        } else if (ci.ran) {
            report = ci.execute();
        } else if (predint.ran) {
            report = predint.execute();
        } else if (bayes.ran) {
            report = bayes.execute();
        } else {
            report = simulate.execute();
        }
        emit(report, json, out);
        return kExitOk;
    } catch (const UsageError& e) {
        return failure(err, "usage error", e, kExitUsage);
    } catch (const CsvError& e) {
        return failure(err, "input error", e, kExitUsage);
    } catch (const ConfigError& e) {
        return failure(err, "configuration error", e, kExitUsage);
    } catch (const nlohmann::json::exception& e) {
        return failure(err, "input error", e, kExitUsage);
    } catch (const DegenerateSampleError& e) {
        return failure(err, "degenerate sample", e, kExitFailure);
    } catch (const ImproperPosteriorError& e) {
        return failure(err, "improper posterior", e, kExitFailure);
    } catch (const SingularDesignError& e) {
        return failure(err, "singular design", e, kExitFailure);
    } catch (const NumericalError& e) {
        return failure(err, "numerical failure", e, kExitFailure);
    } catch (const DomainError& e) {
        return failure(err, "domain error", e, kExitFailure);
    } catch (const std::exception& e) {
        return failure(err, "error", e, kExitFailure);
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("upsr");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace upsr::cli
