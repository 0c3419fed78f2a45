#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "upsr/bayes.hpp"
#include "upsr/estimation.hpp"
#include "upsr/frequentist.hpp"
#include "upsr_cli/app.hpp"
#include "upsr_cli/csv.hpp"
#include "upsr_cli/report.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace upsr;
using namespace upsr::cli;

namespace {

const std::string kSample = std::string(UPSR_DATA_DIR) + "/monthly_returns.csv";

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

Json invoke_json(std::vector<std::string> args) {
    args.insert(args.begin(), "--json");
    const auto r = invoke(args);
    INFO(r.err);
    REQUIRE(r.code == 0);
    return Json::parse(r.out);
}

std::string temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("upsr_cli_" + name);
    std::ofstream(path) << text;
    return path.string();
}

struct EnvGuard {
    explicit EnvGuard(const char* value) {
        if (value != nullptr) {
            ::setenv(kSeedEnv, value, 1);
        } else {
            ::unsetenv(kSeedEnv);
        }
    }
    ~EnvGuard() { ::unsetenv(kSeedEnv); }
};

} // namespace

TEST_CASE("List flags", "[cli]") {
    CHECK(parse_list("", "--coef").empty());
    CHECK(parse_list(" ", "--coef").empty());
    CHECK(parse_list("-0.993, -2.175", "--coef") == std::vector<double>{-0.993, -2.175});
    CHECK(parse_list("1e-3", "--x") == std::vector<double>{1e-3});
    CHECK_THROWS_AS(parse_list("1,,2", "--coef"), UsageError);
    CHECK_THROWS_AS(parse_list("1,", "--coef"), UsageError);
    CHECK_THROWS_AS(parse_list("1,abc", "--coef"), UsageError);
    CHECK_THROWS_AS(parse_list("1,inf", "--coef"), UsageError);
    CHECK_THROWS_AS(parse_list("0.5x", "--coef"), UsageError);
    CHECK(parse_counts("88,968", "--n") == std::vector<std::size_t>{88, 968});
    CHECK_THROWS_AS(parse_counts("2.5", "--n"), UsageError);
    CHECK_THROWS_AS(parse_counts("0", "--n"), UsageError);
}

TEST_CASE("Seed precedence", "[cli]") {
    {
        EnvGuard env(nullptr);
        CHECK(resolve_seed(std::nullopt) == kDefaultSeed);
        CHECK(resolve_seed(9) == 9);
    }
    {
        EnvGuard env("4242");
        CHECK(resolve_seed(std::nullopt) == 4242);
        CHECK(resolve_seed(9) == 9);
        const auto a = invoke_json({"dist", "sample", "--n", "3"});
        const auto b = invoke_json({"dist", "sample", "--n", "3", "--seed", "4242"});
        CHECK(a["seed"] == 4242);
        CHECK(a["values"] == b["values"]);
    }
    {
        EnvGuard env("twelve");
        CHECK_THROWS_AS(resolve_seed(std::nullopt), UsageError);
        CHECK(invoke({"dist", "sample", "--n", "3"}).code == kExitUsage);
    }
}

TEST_CASE("CSV ingestion", "[cli][csv]") {
    SECTION("header and date column detected") {
        std::istringstream in("date,A,B\n2020-01-31,1.5,-2\n2020-02-29,0.5,3\n");
        const auto t = read_returns(in);
        CHECK(t.names == std::vector<std::string>{"A", "B"});
        CHECK(t.dates == std::vector<std::string>{"2020-01-31", "2020-02-29"});
        CHECK(t.date_name == "date");
        CHECK(t.column("B") == std::vector<double>{-2.0, 3.0});
        CHECK(t.column("0") == std::vector<double>{1.5, 0.5});
        CHECK_THROWS_AS(t.column("C"), CsvError);
    }
    SECTION("no header, no dates") {
        std::istringstream in("0.01,0.02\n-0.01,0.03\n0.00,0.01\n");
        const auto t = read_returns(in);
        CHECK(t.names == std::vector<std::string>{"V1", "V2"});
        CHECK(t.dates.empty());
        CHECK(t.rows() == 3);
    }
    SECTION("headerless with dates") {
        std::istringstream in("2021-03,0.1\n2021-04,0.2\n");
        const auto t = read_returns(in);
        CHECK(t.names == std::vector<std::string>{"V1"});
        CHECK(t.dates.size() == 2);
        CHECK(iso_month(t.dates[0]) == 3);
    }
    SECTION("overrides") {
        std::istringstream in("2021-03-01,0.1\n2021-04-01,0.2\n");
        CsvOptions o;
        o.header = true;
        o.date_column = -1;
        CHECK_THROWS_AS(read_returns(in, o), CsvError);  // the header row is consumed; dates become numeric
        std::istringstream again("1,2\n3,4\n");
        o.header = true;
        const auto t = read_returns(again, o);
        CHECK(t.names == std::vector<std::string>{"1", "2"});
        CHECK(t.column("1") == std::vector<double>{3.0});
    }
    SECTION("quoted cells, comments and blank lines") {
        std::istringstream in("# source: test\n\"date\",\"a, b\"\n\n2020-01-01,\"1.25\"\n2020-02-01,2\n");
        const auto t = read_returns(in);
        CHECK(t.names == std::vector<std::string>{"a, b"});
        CHECK(t.column("a, b") == std::vector<double>{1.25, 2.0});
    }
    SECTION("percent divides by 100 and nothing else scales") {
        std::istringstream a("x\n1.5\n-2.25\n3\n");
        std::istringstream b("x\n1.5\n-2.25\n3\n");
        CsvOptions o;
        o.percent = true;
        const auto pct = read_returns(a, o);
        const auto raw = read_returns(b);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(pct.columns[0][i] == raw.columns[0][i] / 100.0);
        }
        std::istringstream c("x\n1.5%\n2%\n");
        CHECK(read_returns(c).column("x") == std::vector<double>{1.5, 2.0});
    }
    SECTION("malformed files") {
        std::istringstream ragged("a,b\n1,2\n3\n");
        CHECK_THROWS_AS(read_returns(ragged), CsvError);
        std::istringstream text("a\n1\nfoo\n");
        CHECK_THROWS_AS(read_returns(text), CsvError);
        std::istringstream empty("");
        CHECK_THROWS_AS(read_returns(empty), CsvError);
        std::istringstream header_only("a,b\n");
        CHECK_THROWS_AS(read_returns(header_only), CsvError);
        std::istringstream quote("\"a\n1\n");
        CHECK_THROWS_AS(read_returns(quote), CsvError);
        std::istringstream nan("a\n1\nnan\n");
        CHECK_THROWS_AS(read_returns(nan), CsvError);
        CHECK_THROWS_AS(read_returns_file("/nonexistent/returns.csv"), CsvError);
    }
    SECTION("ISO dates") {
        CHECK(is_iso_date("2020-12-31"));
        CHECK(is_iso_date("2020-12"));
        CHECK(is_iso_date("2020-12-31T00:00:00Z"));
        CHECK_FALSE(is_iso_date("2020-13-01"));
        CHECK_FALSE(is_iso_date("31/12/2020"));
        CHECK_FALSE(is_iso_date("2020"));
    }
    SECTION("shipped sample file") {
        const auto t = read_returns_file(kSample, {std::nullopt, std::nullopt, true});
        CHECK(t.names == std::vector<std::string>{"MKT", "SMB", "HML", "UMD"});
        CHECK(t.rows() == 360);
        CHECK(t.dates.front() == "1990-01-31");
    }
}

TEST_CASE("JSON output regenerates the text output", "[cli][report]") {
    const std::vector<std::vector<std::string>> commands = {
        {"dist", "quantile", "--coef", "-0.993,-2.175", "--df", "84,964", "--terms", "6", "--p", "0.005,0.995"},
        {"dist", "cdf", "--coef", "1.5", "--df", "10", "--x", "-1,0,1,2"},
        {"dist", "cumulants", "--coef", "3,-1", "--df", "4,250", "--order", "6"},
        {"dist", "sample", "--seed", "3", "--n", "4", "--coef", "0.5", "--df", "12"},
        {"test", "one", "--sr", "0.3", "--n", "60", "--target", "0.1"},
        {"test", "ksample", "--csv", kSample, "--column", "UMD", "--split-month", "1", "--percent", "--sided", "two"},
        {"test", "factor", "--csv", kSample, "--column", "UMD", "--factors", "MKT,HML", "--percent"},
        {"ci", "--sr", "0.25", "--n", "120"},
        {"ci", "--factor", "--sr", "0.25", "--n", "120", "--p-count", "3", "--gram", "0.01"},
        {"predint", "--sr", "0.2", "--n", "60", "--n2", "30"},
        {"bayes", "update", "--mean", "0.01", "--sd", "0.05", "--n", "60", "--mu0", "0.005", "--n0", "12",
         "--sigsq0", "0.002", "--m0", "12"},
        {"bayes", "credint", "--csv", kSample, "--column", "MKT", "--percent"},
        {"bayes", "predint", "--csv", kSample, "--column", "MKT", "--percent", "--n2", "24"},
        {"bayes", "regress", "--csv", kSample, "--column", "UMD", "--factors", "MKT,SMB,HML", "--percent"},
    };
    for (const auto& cmd : commands) {
        const auto text = invoke(cmd);
        std::vector<std::string> with_json = cmd;
        with_json.insert(with_json.begin(), "--json");
        const auto js = invoke(with_json);
        INFO(cmd[0] << " " << cmd[1] << "\n" << text.err << js.err);
        REQUIRE(text.code == 0);
        REQUIRE(js.code == 0);
        const auto parsed = Json::parse(js.out);
        CHECK(render_text(parsed) == text.out);
        CHECK(parsed.contains("method"));
        CHECK(Json::parse(parsed.dump()) == parsed);
    }
}

TEST_CASE("dist command", "[cli]") {
    SECTION("January quantiles") {
        const auto j = invoke_json(
            {"dist", "quantile", "--coef", "-0.993,-2.175", "--df", "84,964", "--terms", "6", "--p", "0.005"});
        CHECK_THAT(j["values"][0].get<double>(), WithinAbs(-5.751, 0.02));
        CHECK(j["terms"]["cornish_fisher"] == 6);
    }
    SECTION("edgeworth cdf at zero of the same law") {
        const auto j = invoke_json({"dist", "cdf", "--coef=-0.993,-2.175", "--df", "84,964", "--terms", "8", "--x", "0"});
        CHECK_THAT(j["values"][0].get<double>(), WithinAbs(0.999, 0.002));
    }
    SECTION("empty lists give the standard normal") {
        const auto j = invoke_json({"dist", "cdf", "--coef", "", "--df", "", "--x", "0"});
        CHECK_THAT(j["values"][0].get<double>(), WithinAbs(0.5, 1e-15));
    }
    SECTION("refined and cf quantiles agree closely") {
        const auto cf = invoke_json({"dist", "quantile", "--coef", "1.5", "--df", "10", "--p", "0.1,0.9"});
        const auto rf =
            invoke_json({"dist", "quantile", "--coef", "1.5", "--df", "10", "--p", "0.1,0.9", "--method", "refined"});
        for (int i = 0; i < 2; ++i) {
            CHECK_THAT(cf["values"][i].get<double>(), WithinAbs(rf["values"][i].get<double>(), 1e-3));
        }
    }
    SECTION("cumulants") {
        const auto j = invoke_json({"dist", "cumulants", "--coef", "1", "--df", "2", "--order", "3"});
        REQUIRE(j["values"].size() == 3);
        CHECK_THAT(j["values"][0].get<double>(), WithinRel(0.88622692545275801, 1e-13));
        CHECK_THAT(j["values"][1].get<double>(), WithinRel(1.2146018366025517, 1e-13));
    }
    SECTION("sampling is deterministic under a seed") {
        const auto a = invoke({"dist", "sample", "--seed", "7", "--n", "5"});
        const auto b = invoke({"dist", "sample", "--seed", "7", "--n", "5"});
        const auto c = invoke({"dist", "sample", "--seed", "8", "--n", "5"});
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        CHECK(a.out != c.out);
    }
    SECTION("usage errors") {
        CHECK(invoke({"dist", "cdf", "--coef", "1,2", "--df", "3", "--x", "0"}).code == kExitUsage);
        CHECK(invoke({"dist", "cdf", "--coef", "1,a", "--df", "3,4", "--x", "0"}).code == kExitUsage);
        CHECK(invoke({"dist", "cdf", "--coef", "1", "--df", "3"}).code == kExitUsage);
        CHECK(invoke({"dist", "quantile", "--p", "1.5"}).code == kExitUsage);
        CHECK(invoke({"dist", "cdf", "--x", "0", "--terms", "40"}).code == kExitUsage);
        CHECK(invoke({"dist", "median", "--x", "0"}).code == kExitUsage);
        CHECK(invoke({}).code == kExitUsage);
        CHECK(invoke({"--help"}).code == kExitOk);
    }
    SECTION("domain failures") {
        const auto r = invoke({"dist", "cdf", "--coef", "1", "--df", "-3", "--x", "0"});
        CHECK(r.code == kExitFailure);
        CHECK_FALSE(r.err.empty());
    }
}

TEST_CASE("test command", "[cli]") {
    SECTION("summary-mode reproduction of the January decision") {
        const double c = 7.25;
        const double g = 1.0 / (2.0 * c * c);
        std::ostringstream sr, gram;
        sr.precision(17);
        gram.precision(17);
        sr << -0.993 / c << "," << 2.175 / c;
        gram << g << "," << g;
        const auto j = invoke_json({"test", "factor", "--sr", sr.str(), "--n", "88,968", "--p-count", "4,4", "--gram",
                                    gram.str(), "--weights", "1,-1", "--alpha", "0.01", "--sided", "two"});
        CHECK(j["reject"] == true);
        CHECK(j["p_value"].get<double>() < 0.01);
        CHECK_THAT(j["interval"]["lo"].get<double>(), WithinAbs(-5.751, 0.02));
        CHECK_THAT(j["interval"]["hi"].get<double>(), WithinAbs(-0.578, 0.02));
        CHECK(j["params"]["dof"] == std::vector<double>{84.0, 964.0});
    }
    SECTION("one-sample test on constant returns fails with exit 3") {
        const auto path = temp_file("constant.csv", "r\n0.01\n0.01\n0.01\n0.01\n0.01\n");
        const auto r = invoke({"test", "one", "--csv", path});
        CHECK(r.code == kExitFailure);
        CHECK(r.err.find("degenerate") != std::string::npos);
    }
    SECTION("CSV mode equals summary mode") {
        const auto table = read_returns_file(kSample, {std::nullopt, std::nullopt, true});
        const auto s = compute_sr({table.column("MKT"), 0.001});
        std::ostringstream sr;
        sr.precision(17);
        sr << s.sr;
        const auto a = invoke_json({"test", "one", "--csv", kSample, "--column", "MKT", "--percent", "--rfr", "0.001",
                                    "--target", "0.05"});
        const auto b = invoke_json({"test", "one", "--sr", sr.str(), "--n", "360", "--target", "0.05"});
        CHECK_THAT(a["inputs"]["samples"][0]["sr"].get<double>(), WithinAbs(s.sr, 1e-12));
        CHECK_THAT(a["p_value"].get<double>(), WithinAbs(b["p_value"].get<double>(), 1e-12));
        CHECK_THAT(a["threshold"].get<double>(), WithinAbs(b["threshold"].get<double>(), 1e-12));
        CHECK(a["reject"] == b["reject"]);
        CHECK(a.contains("noncentral_t"));
    }
    SECTION("factor CSV mode equals summary mode") {
        const auto a = invoke_json({"test", "factor", "--csv", kSample, "--column", "UMD", "--factors", "MKT,SMB,HML",
                                    "--split-month", "1", "--percent", "--sided", "two"});
        const auto& s = a["inputs"]["samples"];
        std::ostringstream sr, n, p, g;
        sr.precision(17);
        g.precision(17);
        sr << s[0]["sr"].get<double>() << "," << s[1]["sr"].get<double>();
        n << s[0]["n"] << "," << s[1]["n"];
        p << s[0]["p"] << "," << s[1]["p"];
        g << s[0]["gram"].get<double>() << "," << s[1]["gram"].get<double>();
        const auto b = invoke_json({"test", "factor", "--sr", sr.str(), "--n", n.str(), "--p-count", p.str(), "--gram",
                                    g.str(), "--sided", "two"});
        CHECK(s[0]["n"].get<int>() + s[1]["n"].get<int>() == 360);
        CHECK(s[0]["n"] == 30);
        CHECK_THAT(a["p_value"].get<double>(), WithinAbs(b["p_value"].get<double>(), 1e-12));
        CHECK_THAT(a["interval"]["lo"].get<double>(), WithinAbs(b["interval"]["lo"].get<double>(), 1e-12));
    }
    SECTION("usage errors") {
        CHECK(invoke({"test", "one", "--sr", "0.1", "--n", "30", "--csv", kSample}).code == kExitUsage);
        CHECK(invoke({"test", "one"}).code == kExitUsage);
        CHECK(invoke({"test", "one", "--sr", "0.1,0.2", "--n", "30,40"}).code == kExitUsage);
        CHECK(invoke({"test", "ksample", "--sr", "0.1,0.2,0.3", "--n", "30,40,50"}).code == kExitUsage);
        CHECK(invoke({"test", "ksample", "--sr", "0.1,0.2", "--n", "30"}).code == kExitUsage);
        CHECK(invoke({"test", "one", "--sr", "0.1", "--n", "30", "--alpha", "1.5"}).code == kExitUsage);
        CHECK(invoke({"test", "one", "--sr", "0.1", "--n", "30", "--sided", "left"}).code == kExitUsage);
        CHECK(invoke({"test", "one", "--csv", kSample, "--column", "XYZ"}).code == kExitUsage);
        CHECK(invoke({"test", "one", "--csv", "/nonexistent.csv"}).code == kExitUsage);
        CHECK(invoke({"test", "ksample", "--csv", kSample, "--column", "MKT,SMB", "--split-month", "1"}).code ==
              kExitUsage);
    }
}

TEST_CASE("ci and predint commands", "[cli]") {
    SECTION("zero Sharpe ratio gives the normal interval") {
        const auto j = invoke_json({"ci", "--sr", "0", "--n", "100", "--alpha", "0.05"});
        CHECK_THAT(j["interval"]["lo"].get<double>(), WithinAbs(-0.196, 1e-3));
        CHECK_THAT(j["interval"]["hi"].get<double>(), WithinAbs(0.196, 1e-3));
    }
    SECTION("factor interval from the file matches the library") {
        const auto j = invoke_json(
            {"ci", "--factor", "--csv", kSample, "--column", "UMD", "--factors", "MKT,SMB,HML", "--percent"});
        const auto& s = j["inputs"]["sample"];
        const FactorSRSummary f{s["sr"].get<double>(), s["n"].get<std::size_t>(), s["p"].get<std::size_t>(),
                                s["gram"].get<double>()};
        const auto iv = factor_sr_confidence_interval(f, 0.05);
        CHECK_THAT(j["interval"]["lo"].get<double>(), WithinAbs(iv.lo, 1e-12));
        CHECK_THAT(j["interval"]["hi"].get<double>(), WithinAbs(iv.hi, 1e-12));
    }
    SECTION("prediction interval endpoints solve the defining equations") {
        const auto j = invoke_json({"predint", "--sr", "0.2", "--n", "60", "--n2", "30", "--alpha", "0.1"});
        const SRSummary s{0.2, 60};
        CHECK_THAT(prediction_cdf(s, 30, j["interval"]["lo"].get<double>()), WithinAbs(0.05, 1e-8));
        CHECK_THAT(prediction_cdf(s, 30, j["interval"]["hi"].get<double>()), WithinAbs(0.95, 1e-8));
        CHECK_THAT(j["cdf_at_endpoints"]["lo"].get<double>(), WithinAbs(0.05, 1e-8));
    }
    SECTION("usage errors") {
        CHECK(invoke({"predint", "--sr", "0.2", "--n", "60"}).code == kExitUsage);
        CHECK(invoke({"ci", "--sr", "0.2", "--n", "60", "--gram", "0.1"}).code == kExitUsage);
        CHECK(invoke({"ci", "--factor", "--sr", "0.2", "--n", "60"}).code == kExitUsage);
    }
}

TEST_CASE("bayes command", "[cli]") {
    SECTION("noninformative credible interval uses the transformed coefficient") {
        const double n = 60.0, zeta = 0.01 / 0.05;
        const auto j = invoke_json({"bayes", "credint", "--mean", "0.01", "--sd", "0.05", "--n", "60"});
        CHECK_THAT(j["params"]["coef"][0].get<double>(), WithinRel(std::sqrt(n) * std::sqrt(n / (n - 1)) * zeta, 1e-12));
        CHECK(j["params"]["dof"][0].get<double>() == 60.0);
        const auto iv = credible_interval(update_nig({}, {0.01, 0.05, 60}), 0.05);
        CHECK_THAT(j["interval"]["lo"].get<double>(), WithinAbs(iv.lo, 1e-12));
        CHECK_THAT(j["interval"]["hi"].get<double>(), WithinAbs(iv.hi, 1e-12));
    }
    SECTION("update from the file equals update from its moments") {
        const auto table = read_returns_file(kSample, {std::nullopt, std::nullopt, true});
        const auto m = sample_moments(table.column("MKT"));
        std::ostringstream mean, sd;
        mean.precision(17);
        sd.precision(17);
        mean << m.mean;
        sd << m.sd;
        const std::vector<std::string> prior = {"--mu0", "0.004", "--n0", "24", "--sigsq0", "0.0016", "--m0", "24"};
        std::vector<std::string> a = {"bayes", "update", "--csv", kSample, "--column", "MKT", "--percent"};
        std::vector<std::string> b = {"bayes", "update", "--mean", mean.str(), "--sd", sd.str(), "--n", "360"};
        a.insert(a.end(), prior.begin(), prior.end());
        b.insert(b.end(), prior.begin(), prior.end());
        const auto ja = invoke_json(a);
        const auto jb = invoke_json(b);
        for (const char* key : {"mu", "n", "sigsq", "m"}) {
            CHECK_THAT(ja["posterior"][key].get<double>(), WithinRel(jb["posterior"][key].get<double>(), 1e-12));
        }
    }
    SECTION("regression with a prior file") {
        const auto flat = invoke_json({"bayes", "regress", "--csv", kSample, "--column", "UMD", "--factors", "MKT",
                                       "--percent"});
        const auto path = temp_file("prior.json",
                                    R"({"beta": [0.0, 0.0], "lambda": [[1e-9, 0], [0, 1e-9]], "sigsq": 1e-9, "m": 1e-9})");
        const auto weak = invoke_json({"bayes", "regress", "--csv", kSample, "--column", "UMD", "--factors", "MKT",
                                       "--percent", "--prior-file", path});
        CHECK_THAT(weak["posterior"]["beta"][0].get<double>(), WithinAbs(flat["posterior"]["beta"][0].get<double>(), 1e-8));
        const auto bad = temp_file("bad_prior.json", R"({"beta": [0.0], "lambda": [[1]], "sigsq": 1, "m": 1})");
        CHECK(invoke({"bayes", "regress", "--csv", kSample, "--column", "UMD", "--factors", "MKT", "--prior-file", bad})
                  .code == kExitUsage);
        const auto broken = temp_file("broken_prior.json", "{beta: ");
        CHECK(invoke({"bayes", "regress", "--csv", kSample, "--column", "UMD", "--prior-file", broken}).code ==
              kExitUsage);
    }
    SECTION("improper posterior requests fail with exit 3") {
        const auto r = invoke({"bayes", "credint"});
        CHECK(r.code == kExitFailure);
        CHECK(r.err.find("improper") != std::string::npos);
        CHECK(invoke({"bayes", "predint", "--n2", "12"}).code == kExitFailure);
    }
    SECTION("usage errors") {
        CHECK(invoke({"bayes", "credint", "--mean", "0.01"}).code == kExitUsage);
        CHECK(invoke({"bayes", "credint", "--mean", "0.01", "--sd", "0.05", "--n", "60", "--csv", kSample}).code ==
              kExitUsage);
        CHECK(invoke({"bayes", "predint", "--mean", "0.01", "--sd", "0.05", "--n", "60"}).code == kExitUsage);
        CHECK(invoke({"bayes", "regress", "--mean", "0.01", "--sd", "0.05", "--n", "60"}).code == kExitUsage);
    }
}

TEST_CASE("simulate command", "[cli]") {
    const auto plan = temp_file("plan.txt", "scenario = t\nprocedure = sr_ci\nreplications = 200\nsnr = 0.3\nn = 40\n");
    SECTION("plan without a seed follows the environment") {
        EnvGuard env("77");
        const auto a = invoke_json({"simulate", "--plan", plan});
        const auto b = invoke_json({"simulate", "--plan", plan, "--seed", "77"});
        CHECK(a["seed"] == 77);
        CHECK(a["result"] == b["result"]);
    }
    SECTION("the plan's seed beats the environment, the flag beats both") {
        const auto seeded = temp_file("plan_seeded.txt", "procedure = sr_ci\nreplications = 50\nseed = 5\nn = 40\n");
        EnvGuard env("77");
        CHECK(invoke_json({"simulate", "--plan", seeded})["seed"] == 5);
        CHECK(invoke_json({"simulate", "--plan", seeded, "--seed", "6"})["seed"] == 6);
    }
    SECTION("overrides and thread independence") {
        const auto a = invoke_json({"simulate", "--plan", plan, "--threads", "1", "--replications", "120"});
        const auto b = invoke_json({"simulate", "--plan", plan, "--threads", "3", "--replications", "120"});
        CHECK(a["result"]["replications"] == 120);
        CHECK(a["result"] == b["result"]);
    }
    SECTION("configuration errors") {
        CHECK(invoke({"simulate", "--plan", "/nonexistent/plan"}).code == kExitUsage);
        CHECK(invoke({"simulate", "--plan", plan, "--procedure", "nope"}).code == kExitUsage);
        CHECK(invoke({"simulate"}).code == kExitUsage);
        const auto bad = temp_file("plan_bad.txt", "procedure = sr_ci\ncolour = red\n");
        CHECK(invoke({"simulate", "--plan", bad}).code == kExitUsage);
    }
}
