// qmean: error tables, bound checks and dumps as CSV or JSON.
// Exit status: 0 success, 2 invalid configuration, 3 failed check under --assert.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmean/checks.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitCheckFailed = 3;

/// Invalid configuration, reported with the offending flag.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& flag, const std::string& what) : std::runtime_error(flag + ": " + what) {}
};

struct Common {
    std::string format = "csv";
    std::string output;
    int parallelism = qmean::default_parallelism();
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output", c.output, "output file (default stdout)");
    cmd->add_option("--parallelism", c.parallelism, "worker threads (default QMEAN_PARALLELISM or 1)")
        ->check(CLI::PositiveNumber);
}

void emit(const Common& c, const std::string& text) {
    if (c.output.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw ConfigError("--output", "cannot open " + c.output);
    out << text;
}

qmean::SymmetricMeasure measure_from(const std::string& spec, int n) {
    if (spec == "uniform-inputs") return qmean::uniform_inputs(n);
    if (spec == "uniform-means") return qmean::uniform_means(n);
    if (!std::filesystem::exists(spec)) throw ConfigError("--measure", "unknown measure or missing file '" + spec + "'");
    auto mu = qmean::load_measure_file(spec);
    if (mu.n() != n) throw ConfigError("--measure", "file is for n=" + std::to_string(mu.n()) + ", not " + std::to_string(n));
    return mu;
}

struct EstimatorArgs {
    std::string estimator = "ae";
    int r = 4;
    bool round_to_count = false;

    qmean::Estimator make(int M) const {
        if (estimator == "ae") return qmean::Estimator::ae(M, round_to_count);
        if (estimator == "median-reps") return qmean::Estimator::median_reps(M, r, round_to_count);
        if (round_to_count) throw ConfigError("--round-to-count", "only applies to ae and median-reps");
        if (estimator == "ae-oracle") return qmean::Estimator::ae_oracle(M);
        if (estimator == "constant") return qmean::Estimator::constant();
        if (estimator == "bernoulli") return qmean::Estimator::bernoulli(M);
        throw ConfigError("--estimator", "unknown estimator '" + estimator + "'");
    }
};

void add_estimator(CLI::App* cmd, EstimatorArgs& e) {
    cmd->add_option("--estimator", e.estimator, "ae | ae-oracle | median-reps | constant | bernoulli")
        ->check(CLI::IsMember({"ae", "ae-oracle", "median-reps", "constant", "bernoulli"}));
    cmd->add_option("--r", e.r, "repetitions for median-reps")->check(CLI::PositiveNumber);
    cmd->add_flag("--round-to-count", e.round_to_count, "round each estimate to the nearest multiple of 1/n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qmean: exact error criteria and bound checks for Boolean mean estimators"};
    app.require_subcommand(1);

    // error-table
    Common et_common;
    EstimatorArgs et_est;
    int et_n = 0;
    std::vector<int> et_M;
    std::string et_criterion;
    std::string et_measure;
    std::optional<double> et_p, et_q;
    bool et_scaled = false;
    auto* et = app.add_subcommand("error-table", "criterion value for each M");
    add_common(et, et_common);
    add_estimator(et, et_est);
    et->add_option("--n", et_n, "input length")->required();
    et->add_option("--M", et_M, "budgets (comma separated)")->delimiter(',')->required();
    et->add_option("--criterion", et_criterion, "worst-prob | avg-prob | worst-expected | avg-expected")->required();
    et->add_option("--measure", et_measure, "uniform-inputs | uniform-means | measure file");
    et->add_option("--p", et_p, "success probability for probabilistic criteria");
    et->add_option("--q", et_q, "moment for expected criteria");
    et->add_flag("--count-scaled", et_scaled, "report n times the value (approximate count)");

    // check
    Common ck_common;
    std::string ck_name;
    bool ck_assert = false;
    std::optional<int> ck_n;
    int ck_n_min = 4, ck_n_max = -1, ck_M_max = 8, ck_count = 200;
    std::vector<int> ck_M;
    std::string ck_measure = "uniform-inputs";
    std::uint64_t ck_seed = 20240601;
    auto* ck = app.add_subcommand("check", "run one verification suite");
    add_common(ck, ck_common);
    ck->add_option("name", ck_name, "suite name")
        ->required()
        ->check(CLI::IsMember({"const-alg", "lemma61", "ae-exact", "zero-error", "floors", "markov", "median-shape",
                               "degree-law", "degree-oracle", "distinguisher"}));
    ck->add_flag("--assert", ck_assert, "exit 3 when the check fails");
    ck->add_option("--n", ck_n, "input length");
    ck->add_option("--n-min", ck_n_min, "lemma61: smallest n");
    ck->add_option("--n-max", ck_n_max, "largest n (lemma61, ae-exact, degree-law)");
    ck->add_option("--M", ck_M, "budget grid")->delimiter(',');
    ck->add_option("--M-max", ck_M_max, "degree-law: largest M");
    ck->add_option("--measure", ck_measure, "floors: uniform-inputs | uniform-means")
        ->check(CLI::IsMember({"uniform-inputs", "uniform-means"}));
    ck->add_option("--count", ck_count, "markov: number of sampled distributions")->check(CLI::PositiveNumber);
    ck->add_option("--seed", ck_seed, "markov: selection seed");

    // degree-lp
    Common lp_common;
    int lp_n = 0, lp_k1 = 0, lp_k2 = 0;
    double lp_c = 0.0;
    auto* lp = app.add_subcommand("degree-lp", "minimal degree separating two weight classes");
    add_common(lp, lp_common);
    lp->add_option("--n", lp_n)->required();
    lp->add_option("--k1", lp_k1)->required();
    lp->add_option("--k2", lp_k2)->required();
    lp->add_option("--c", lp_c, "approximation tolerance in [0, 1/2)")->required();

    // dist-dump
    Common dd_common;
    EstimatorArgs dd_est;
    int dd_n = 0, dd_k = 0, dd_M = 2;
    auto* dd = app.add_subcommand("dist-dump", "exact outcome distribution of one weight class");
    add_common(dd, dd_common);
    add_estimator(dd, dd_est);
    dd->add_option("--n", dd_n)->required();
    dd->add_option("--k", dd_k)->required();
    dd->add_option("--M", dd_M, "budget");

    // measure-dump
    Common md_common;
    int md_n = 0;
    std::string md_measure;
    auto* md = app.add_subcommand("measure-dump", "class weights of an input measure");
    add_common(md, md_common);
    md->add_option("--n", md_n)->required();
    md->add_option("--measure", md_measure, "uniform-inputs | uniform-means | measure file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*et) {
            if (et_n < 1) throw ConfigError("--n", "must be positive");
            qmean::Criterion crit;
            try {
                crit = qmean::parse_criterion(et_criterion);
            } catch (const std::exception& e) {
                throw ConfigError("--criterion", e.what());
            }
            if (crit == qmean::Criterion::Quantile || crit == qmean::Criterion::ExpectedLq)
                throw ConfigError("--criterion", "per-input criterion; use a worst- or avg- form");
            if (qmean::is_probabilistic(crit) && !et_p) throw ConfigError("--p", "required for " + et_criterion);
            if (!qmean::is_probabilistic(crit) && !et_q) throw ConfigError("--q", "required for " + et_criterion);
            if (qmean::is_probabilistic(crit) && et_q) throw ConfigError("--q", "not used by " + et_criterion);
            if (!qmean::is_probabilistic(crit) && et_p) throw ConfigError("--p", "not used by " + et_criterion);
            if (qmean::is_average(crit) && et_measure.empty()) throw ConfigError("--measure", "required for " + et_criterion);
            if (!qmean::is_average(crit) && !et_measure.empty()) throw ConfigError("--measure", "not used by " + et_criterion);
            std::optional<qmean::SymmetricMeasure> mu;
            if (!et_measure.empty()) mu = measure_from(et_measure, et_n);
            std::vector<qmean::ErrorReport> rows;
            for (int M : et_M) {
                qmean::ErrorReport rep;
                try {
                    rep = qmean::evaluate_criterion(crit, et_est.make(M), et_n, et_p.value_or(0.0), et_q.value_or(1.0),
                                                    mu ? &*mu : nullptr, et_common.parallelism);
                } catch (const ConfigError&) {
                    throw;
                } catch (const std::domain_error& e) {
                    const std::string what = e.what();
                    const std::string flag = what.find(" p ") != std::string::npos   ? "--p"
                                             : what.find(" q ") != std::string::npos ? "--q"
                                                                                      : "--M";
                    throw ConfigError(flag, what);
                }
                if (et_scaled) rep = qmean::count_scaled(rep);
                rows.push_back(std::move(rep));
            }
            emit(et_common, et_common.format == "csv" ? qmean::io::error_reports_csv(rows)
                                                      : qmean::io::error_reports_json(rows));
            return 0;
        }

        if (*ck) {
            namespace c = qmean::checks;
            const int par = ck_common.parallelism;
            c::CheckReport rep;
            if (ck_name == "const-alg") {
                rep = ck_n ? c::const_alg({*ck_n}, false) : c::const_alg();
            } else if (ck_name == "lemma61") {
                const int hi = ck_n_max > 0 ? ck_n_max : 2000;
                if (ck_n_min < 4) throw ConfigError("--n-min", "must be >= 4");
                if (hi < ck_n_min) throw ConfigError("--n-max", "must be >= --n-min");
                rep = c::lemma61(ck_n_min, hi, par);
            } else if (ck_name == "ae-exact") {
                const int hi = ck_n_max > 0 ? ck_n_max : 32;
                if (hi < 2) throw ConfigError("--n-max", "must be >= 2");
                std::vector<int> Ms = ck_M.empty() ? std::vector<int>{2, 4, 8, 16, 32, 64} : ck_M;
                for (int M : Ms)
                    if (M < 2 || M > qmean::kUnitaryOracleMaxM) throw ConfigError("--M", "values must lie in [2, 256]");
                rep = c::ae_exact(hi, Ms, par);
            } else if (ck_name == "zero-error") {
                const int n = ck_n.value_or(16);
                const int M = ck_M.empty() ? 76 : ck_M.front();
                if (n < 1) throw ConfigError("--n", "must be positive");
                if (M < 2) throw ConfigError("--M", "must be >= 2");
                rep = c::zero_error(n, M, c::kDefaultP, par);
            } else if (ck_name == "floors") {
                const int n = ck_n.value_or(4096);
                if (n < 8) throw ConfigError("--n", "must be >= 8");
                for (int M : ck_M)
                    if (M < 2) throw ConfigError("--M", "values must be >= 2");
                rep = c::floors(ck_measure == "uniform-inputs", n, ck_M.empty() ? c::powers_of_two(8, 512) : ck_M, par);
            } else if (ck_name == "markov") {
                rep = c::markov(ck_count, ck_seed);
            } else if (ck_name == "median-shape") {
                const int n = ck_n.value_or(256);
                if (n < 1) throw ConfigError("--n", "must be positive");
                for (int M : ck_M)
                    if (M < 2) throw ConfigError("--M", "values must be >= 2");
                rep = c::median_shape(n, 4, ck_M.empty() ? std::vector<int>{8, 16, 32, 64, 128} : ck_M, par);
            } else if (ck_name == "degree-law") {
                const int hi = ck_n_max > 0 ? ck_n_max : 12;
                if (hi < 2 || hi > qmean::kSymmetrizeMaxN) throw ConfigError("--n-max", "must lie in [2, 20]");
                if (ck_M_max < 2) throw ConfigError("--M-max", "must be >= 2");
                rep = c::degree_law(hi, ck_M_max, qmean::kDefaultDegreeTolerance, par);
            } else if (ck_name == "degree-oracle") {
                std::vector<int> ns = ck_n ? std::vector<int>{*ck_n} : std::vector<int>{20, 40};
                for (int n : ns)
                    if (n < 2 || n > qmean::kDegreeLpMaxN) throw ConfigError("--n", "must lie in [2, 80]");
                rep = c::degree_oracle(ns, 0.49, {0.0, 0.1, 0.25, 0.4, 0.49}, ns.front(), par);
            } else if (ck_name == "distinguisher") {
                const int n = ck_n.value_or(16);
                const int M = ck_M.empty() ? 32 : ck_M.front();
                if (n < 5) throw ConfigError("--n", "must be >= 5");
                if (M < 2) throw ConfigError("--M", "must be >= 2");
                rep = c::distinguisher_bound(n, M, 0.81, 4);
            }
            emit(ck_common, ck_common.format == "csv" ? rep.csv : rep.json);
            std::fprintf(stderr, "%s %s: %s\n", rep.passed ? "PASS" : "FAIL", rep.name.c_str(), rep.summary.c_str());
            return (ck_assert && !rep.passed) ? kExitCheckFailed : 0;
        }

        if (*lp) {
            if (lp_n < 1 || lp_n > qmean::kDegreeLpMaxN) throw ConfigError("--n", "must lie in [1, 80]");
            if (!(lp_k2 >= 0 && lp_k2 < lp_k1 && lp_k1 <= lp_n)) throw ConfigError("--k1", "need 0 <= k2 < k1 <= n");
            if (!(lp_c >= 0.0 && lp_c < 0.5)) throw ConfigError("--c", "must lie in [0, 1/2)");
            const auto w = qmean::min_degree_lp(qmean::PartialFnSpec(lp_n, lp_k1, lp_k2), lp_c);
            if (lp_common.format == "json") {
                emit(lp_common, qmean::io::to_json(w).dump(2) + "\n");
            } else {
                std::string csv = "n,k1,k2,c,degree,power,coefficient\n";
                for (std::size_t i = 0; i < w.coefficients.size(); ++i)
                    csv += std::to_string(w.n) + "," + std::to_string(w.k1) + "," + std::to_string(w.k2) + "," +
                           qmean::io::fmt(w.c) + "," + std::to_string(w.degree) + "," + std::to_string(i) + "," +
                           qmean::io::fmt(w.coefficients[i]) + "\n";
                emit(lp_common, csv);
            }
            return 0;
        }

        if (*dd) {
            if (dd_n < 1) throw ConfigError("--n", "must be positive");
            if (dd_k < 0 || dd_k > dd_n) throw ConfigError("--k", "must lie in [0, n]");
            if (dd_M < 1 || (dd_est.estimator != "bernoulli" && dd_est.estimator != "constant" && dd_M < 2))
                throw ConfigError("--M", "must be >= 2 for quantum estimators and >= 1 for bernoulli");
            if (dd_est.estimator == "ae-oracle" && dd_M > qmean::kUnitaryOracleMaxM)
                throw ConfigError("--M", "ae-oracle supports M <= 256");
            const auto d = dd_est.make(dd_M).distribution(qmean::WeightClass(dd_n, dd_k));
            emit(dd_common, dd_common.format == "csv" ? qmean::io::distribution_csv(d)
                                                      : qmean::io::to_json(d).dump(2) + "\n");
            return 0;
        }

        if (*md) {
            if (md_n < 1) throw ConfigError("--n", "must be positive");
            const auto mu = measure_from(md_measure, md_n);
            emit(md_common, md_common.format == "csv" ? qmean::io::measure_csv(mu) : qmean::io::to_json(mu).dump(2) + "\n");
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return kExitInvalid;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return kExitInvalid;
    }
    return 0;
}
