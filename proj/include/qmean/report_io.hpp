#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmean/bounds_lab.hpp"
#include "qmean/error_criteria.hpp"
#include "qmean/estimators.hpp"
#include "qmean/measures.hpp"
#include "qmean/poly_method.hpp"

namespace qmean::io {

using Json = nlohmann::ordered_json;

/// Text form of a real with 12 significant digits.
inline std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// Real rounded to 12 significant digits, so JSON output carries the same digits as CSV.
inline double round12(double x) { return std::stod(fmt(x)); }

inline std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

inline Json json_number(const std::optional<double>& x) { return x ? Json(round12(*x)) : Json(nullptr); }

// ---- ErrorReport: criterion,n,T,p,q,measure,value

inline const char* kErrorReportHeader = "criterion,n,T,p,q,measure,value";

inline std::string csv_row(const ErrorReport& r) {
    std::ostringstream os;
    os << r.tag() << ',' << r.n << ',' << r.T << ',' << fmt(r.p) << ',' << fmt(r.q) << ','
       << r.measure.value_or("") << ',' << fmt(r.value);
    return os.str();
}

inline Json to_json(const ErrorReport& r) {
    Json j;
    j["criterion"] = r.tag();
    j["estimator"] = r.estimator;
    j["n"] = r.n;
    j["T"] = r.T;
    j["p"] = json_number(r.p);
    j["q"] = json_number(r.q);
    j["measure"] = r.measure ? Json(*r.measure) : Json(nullptr);
    j["value"] = round12(r.value);
    return j;
}

inline std::string error_reports_csv(const std::vector<ErrorReport>& rows) {
    std::string out = std::string(kErrorReportHeader) + "\n";
    for (const auto& r : rows) out += csv_row(r) + "\n";
    return out;
}

inline std::string error_reports_json(const std::vector<ErrorReport>& rows) {
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    return arr.dump(2) + "\n";
}

// ---- floor sweeps: name,n,T,p,q,measure,value,floor,ratio

inline const char* kSweepHeader = "name,n,T,p,q,measure,value,floor,ratio";

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << kSweepHeader << '\n';
    for (const auto& r : rows) {
        os << r.name << ',' << r.n << ',' << r.T << ',' << fmt(r.p) << ',' << fmt(r.q) << ','
           << r.measure.value_or("") << ',' << fmt(r.value) << ',' << fmt(r.floor) << ',' << fmt(r.ratio) << '\n';
    }
    return os.str();
}

inline std::string sweep_json(const std::vector<SweepRow>& rows) {
    Json arr = Json::array();
    for (const auto& r : rows) {
        Json j;
        j["name"] = r.name;
        j["n"] = r.n;
        j["T"] = r.T;
        j["p"] = json_number(r.p);
        j["q"] = json_number(r.q);
        j["measure"] = r.measure ? Json(*r.measure) : Json(nullptr);
        j["value"] = round12(r.value);
        j["floor"] = round12(r.floor);
        j["ratio"] = round12(r.ratio);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

// ---- BoundCheck: {name, params, lhs, rhs, holds, margin}

inline Json to_json(const BoundCheck& b) {
    Json params = Json::object();
    for (const auto& [k, v] : b.params) params[k] = round12(v);
    Json j;
    j["name"] = b.name;
    j["params"] = std::move(params);
    j["lhs"] = round12(b.lhs);
    j["rhs"] = round12(b.rhs);
    j["holds"] = b.holds;
    j["margin"] = round12(b.margin);
    return j;
}

inline std::string bound_checks_json(const std::vector<BoundCheck>& checks) {
    Json arr = Json::array();
    for (const auto& b : checks) arr.push_back(to_json(b));
    return arr.dump(2) + "\n";
}

inline std::string bound_checks_csv(const std::vector<BoundCheck>& checks) {
    std::ostringstream os;
    os << "name,params,lhs,rhs,holds,margin\n";
    for (const auto& b : checks) {
        std::string params;
        for (const auto& [k, v] : b.params) {
            if (!params.empty()) params += ';';
            params += k + "=" + fmt(v);
        }
        os << b.name << ',' << params << ',' << fmt(b.lhs) << ',' << fmt(b.rhs) << ',' << (b.holds ? "true" : "false")
           << ',' << fmt(b.margin) << '\n';
    }
    return os.str();
}

// ---- OutcomeDistribution: {n, k, queries, atoms: [[estimate, prob], ...]}

inline Json to_json(const OutcomeDistribution& d) {
    Json atoms = Json::array();
    for (const Atom& a : d.atoms()) atoms.push_back(Json::array({round12(a.estimate), round12(a.prob)}));
    Json j;
    j["n"] = d.input().n;
    j["k"] = d.input().k;
    j["queries"] = d.queries();
    j["atoms"] = std::move(atoms);
    return j;
}

inline std::string distribution_csv(const OutcomeDistribution& d) {
    std::ostringstream os;
    os << "n,k,queries,estimate,prob\n";
    for (const Atom& a : d.atoms())
        os << d.input().n << ',' << d.input().k << ',' << d.queries() << ',' << fmt(a.estimate) << ',' << fmt(a.prob)
           << '\n';
    return os.str();
}

// ---- Degree witness: {n, k1, k2, c, degree, coefficients}

inline Json to_json(const DegreeWitness& w) {
    Json coeffs = Json::array();
    for (double c : w.coefficients) coeffs.push_back(round12(c));
    Json j;
    j["n"] = w.n;
    j["k1"] = w.k1;
    j["k2"] = w.k2;
    j["c"] = round12(w.c);
    j["degree"] = w.degree;
    j["coefficients"] = std::move(coeffs);
    return j;
}

// ---- Measures

inline Json to_json(const SymmetricMeasure& mu) {
    Json probs = Json::array();
    for (double p : mu.class_probs()) probs.push_back(round12(p));
    Json j;
    j["name"] = mu.name();
    j["n"] = mu.n();
    j["class_prob"] = std::move(probs);
    return j;
}

inline std::string measure_csv(const SymmetricMeasure& mu) {
    std::ostringstream os;
    os << "k,class_prob,per_string\n";
    for (int k = 0; k <= mu.n(); ++k) os << k << ',' << fmt(mu.class_prob(k)) << ',' << fmt(mu.per_string(k)) << '\n';
    return os.str();
}

}  // namespace qmean::io
