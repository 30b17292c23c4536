#include "truncfit/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>

#include "truncfit/error.hpp"
#include "truncfit/model_literal.hpp"

namespace truncfit {

namespace {

// JSON has no infinity; encode it as null and read null back as +inf.
Json real(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

double real_from(const Json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

Method method_from_name(const std::string& s) {
    for (auto m : {Method::MinDv, Method::AuxMoment, Method::AuxML}) {
        if (method_name(m) == s) return m;
    }
    throw ParseError("unknown method '" + s + "' in report");
}

Family family_from_name(const std::string& s) {
    for (auto f : {Family::Binomial, Family::Poisson, Family::Normal, Family::Gamma, Family::Weibull}) {
        if (family_name(f) == s) return f;
    }
    throw ParseError("unknown family '" + s + "' in report");
}

}  // namespace

std::string digest_bytes(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string digest_files(std::span<const std::filesystem::path> paths) {
    std::string all;
    for (const auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw InvalidArgument("cannot read " + p.string());
        all.append(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return digest_bytes(all);
}

Json to_json(const DistributionModel& model) {
    Json params = Json::object();
    const auto names = param_names(model.family());
    for (std::size_t i = 0; i < names.size(); ++i) params[std::string(names[i])] = model.param(i);
    return {{"family", family_name(model.family())}, {"params", params}, {"literal", format_model(model)}};
}

DistributionModel model_from_json(const Json& j) {
    const auto family = family_from_name(j.at("family").get<std::string>());
    const auto names = param_names(family);
    std::vector<double> params;
    for (auto n : names) params.push_back(j.at("params").at(std::string(n)).get<double>());
    return {family, std::move(params)};
}

Json to_json(const EstimationReport& r) {
    Json names = Json::array();
    const auto all = param_names(r.fitted.family());
    for (auto i : r.free_indices) names.push_back(all[i]);
    Json j{{"method", method_name(r.method)},
           {"free_indices", r.free_indices},
           {"free_names", names},
           {"estimate", r.estimate},
           {"fitted", to_json(r.fitted)},
           {"objective_at_estimate", real(r.objective_at_estimate)},
           {"evaluations", r.evaluations},
           {"converged", r.converged}};
    j["agreement_gap"] = r.agreement_gap ? Json(*r.agreement_gap) : Json(nullptr);
    return j;
}

EstimationReport report_from_json(const Json& j) {
    EstimationReport r;
    r.method = method_from_name(j.at("method").get<std::string>());
    r.free_indices = j.at("free_indices").get<std::vector<std::size_t>>();
    r.estimate = j.at("estimate").get<std::vector<double>>();
    r.fitted = model_from_json(j.at("fitted"));
    r.objective_at_estimate = real_from(j.at("objective_at_estimate"));
    r.evaluations = j.at("evaluations").get<std::size_t>();
    r.converged = j.at("converged").get<bool>();
    if (!j.at("agreement_gap").is_null()) r.agreement_gap = j.at("agreement_gap").get<double>();
    return r;
}

bool same_report(const EstimationReport& a, const EstimationReport& b) {
    return a.method == b.method && a.free_indices == b.free_indices && a.estimate == b.estimate &&
           a.fitted == b.fitted && a.objective_at_estimate == b.objective_at_estimate &&
           a.evaluations == b.evaluations && a.converged == b.converged && a.agreement_gap == b.agreement_gap;
}

Json to_json(const SelectionResult& s) {
    Json ranked = Json::array();
    for (const auto& c : s.ranked) {
        ranked.push_back({{"id", c.id}, {"fitted", to_json(c.fitted)}, {"dv", real(c.dv)}});
    }
    return {{"ranked", ranked}, {"winner", s.winner}};
}

Json to_json(const ExperimentResult& r) {
    return {{"rate", r.rate}, {"correct", r.correct}, {"scored", r.scored}, {"excluded", r.excluded}};
}

Json to_json(const GofResult& g) {
    return {{"observed_dv", g.observed_dv},
            {"empirical_cdf_at_observed", g.empirical_cdf_at_observed},
            {"critical_value", g.critical_value},
            {"reject", g.reject},
            {"N", g.N},
            {"alpha", g.alpha},
            {"resampled", g.resampled}};
}

Json to_json(const FrequencyTable& t) {
    Json j{{"points", t.points()}, {"counts", t.counts()}, {"total", t.total()}};
    if (t.bin_width()) j["bin_width"] = *t.bin_width();
    return j;
}

Json to_json(const MixtureInit& m) {
    const auto& s = m.split;
    const bool undetermined = s.side_of_m1 == MixtureSide::Undetermined;
    auto tail = [](const TailMeanEstimate& t) {
        return Json{{"m_dv", t.m_dv}, {"m_aux", t.m_aux}, {"tail_mean", t.tail_mean}, {"rows", t.rows}};
    };
    Json j{{"m_g", s.m_g},
           {"s_l", s.s_l},
           {"s_r", s.s_r},
           {"sup_l", s.sup_l},
           {"min_r", s.min_r},
           {"side_of_m1", side_name(s.side_of_m1)},
           {"left_table", to_json(s.left_table)},
           {"right_table", to_json(s.right_table)}};
    j[undetermined ? "left_mean" : "m1"] = tail(m.m1);
    j[undetermined ? "right_mean" : "m2"] = tail(m.m2);
    j["alpha"] = m.alpha;
    j["alpha_clamped"] = m.alpha_clamped;
    return j;
}

Json ReportDocument::to_json() const {
    Json reps = Json::array();
    for (const auto& r : reports) reps.push_back(truncfit::to_json(r));
    return {{"schema_version", kReportSchemaVersion},
            {"command", command},
            {"input_digest", input_digest},
            {"reports", reps},
            {"result", result},
            {"warnings", warnings}};
}

ReportDocument ReportDocument::from_json(const Json& j) {
    const int version = j.at("schema_version").get<int>();
    if (version != kReportSchemaVersion) {
        throw ParseError("unsupported report schema version " + std::to_string(version));
    }
    ReportDocument d;
    d.command = j.at("command").get<std::vector<std::string>>();
    d.input_digest = j.at("input_digest").get<std::string>();
    for (const auto& r : j.at("reports")) d.reports.push_back(report_from_json(r));
    d.result = j.at("result");
    d.warnings = j.at("warnings").get<std::vector<std::string>>();
    return d;
}

bool ReportDocument::operator==(const ReportDocument& o) const {
    if (reports.size() != o.reports.size()) return false;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (!same_report(reports[i], o.reports[i])) return false;
    }
    return command == o.command && input_digest == o.input_digest && result == o.result && warnings == o.warnings;
}

}  // namespace truncfit
