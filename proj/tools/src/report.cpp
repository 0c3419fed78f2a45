#include "upsr_cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace upsr::cli {

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

Json to_json(const UpsilonParams& params) {
    return Json{{"coef", params.coef()}, {"dof", params.dof()}};
}

Json to_json(const ApproxOrder& order) {
    return Json{{"edgeworth", order.edgeworth_terms}, {"cornish_fisher", order.cf_terms}};
}

Json to_json(const Interval& interval) { return Json{{"lo", interval.lo}, {"hi", interval.hi}}; }

Json to_json(const NIGHyper& h) { return Json{{"mu", h.mu}, {"n", h.n}, {"sigsq", h.sigsq}, {"m", h.m}}; }

Json to_json(const CoverageResult& r) {
    return Json{{"scenario", r.scenario}, {"procedure", r.procedure}, {"replications", r.replications},
                {"hits", r.hits},         {"rate", r.rate},           {"std_error", r.std_error}};
}

Json inference_report(const InferenceResult& r, Json inputs) {
    Json j;
    j["method"] = r.method;
    j["inputs"] = std::move(inputs);
    j["statistic"] = r.statistic;
    if (r.threshold) {
        j["threshold"] = *r.threshold;
    }
    if (r.interval) {
        j["interval"] = to_json(*r.interval);
    }
    j["p_value"] = r.p_value;
    j["reject"] = r.reject;
    j["alpha"] = r.alpha;
    j["sided"] = to_string(r.sided);
    j["params"] = to_json(r.params);
    j["terms"] = to_json(r.order);
    if (r.classical_p_value) {
        Json c;
        c["p_value"] = *r.classical_p_value;
        if (r.classical_reject) {
            c["reject"] = *r.classical_reject;
        }
        j["noncentral_t"] = std::move(c);
    }
    return j;
}

namespace {

bool is_flat(const Json& j) {
    for (const auto& v : j) {
        if (v.is_structured()) {
            return false;
        }
    }
    return true;
}

std::string scalar(const Json& j) {
    if (j.is_number_float()) {
        return format_number(j.get<double>());
    }
    if (j.is_number()) {
        return j.dump();
    }
    if (j.is_string()) {
        return j.get<std::string>();
    }
    if (j.is_boolean()) {
        return j.get<bool>() ? "yes" : "no";
    }
    if (j.is_null()) {
        return "-";
    }
    std::string s;
    for (const auto& v : j) {
        s += (s.empty() ? "" : ", ") + scalar(v);
    }
    return "[" + s + "]";
}

void render(const Json& j, int indent, std::ostringstream& out) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& v = it.value();
        if (v.is_object() && !v.empty()) {
            if (v.size() == 2 && v.contains("lo") && v.contains("hi")) {
                out << pad << it.key() << ": (" << scalar(v["lo"]) << ", " << scalar(v["hi"]) << ")\n";
            } else {
                out << pad << it.key() << ":\n";
                render(v, indent + 2, out);
            }
        } else if (v.is_array() && !is_flat(v)) {
            out << pad << it.key() << ":\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v[i].is_object()) {
                    out << pad << "  [" << i << "]\n";
                    render(v[i], indent + 4, out);
                } else {
                    out << pad << "  " << scalar(v[i]) << "\n";
                }
            }
        } else {
            out << pad << it.key() << ": " << scalar(v) << "\n";
        }
    }
}

} // namespace

std::string render_text(const Json& report) {
    std::ostringstream out;
    render(report, 0, out);
    return out.str();
}

} // namespace upsr::cli
