#include "truncfit/model_literal.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "truncfit/error.hpp"

namespace truncfit {

namespace {

std::string normalize(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

Family parse_family(std::string_view name) {
    for (Family f : {Family::Binomial, Family::Poisson, Family::Normal, Family::Gamma, Family::Weibull}) {
        if (family_name(f) == name) return f;
    }
    throw ParseError("unknown distribution family '" + std::string(name) + "'");
}

double parse_number(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("invalid number '" + std::string(s) + "'");
    }
    return v;
}

// Placeholder values used for free slots; only ever overwritten by estimators.
double placeholder(Family family, std::size_t i) {
    switch (family) {
        case Family::Binomial: return i == 0 ? 1.0 : 0.5;
        default: return 1.0;
    }
}

}  // namespace

std::vector<std::size_t> ModelTemplate::free_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]) out.push_back(i);
    }
    return out;
}

DistributionModel ModelTemplate::instantiate() const {
    std::vector<double> values(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) values[i] = params[i].value_or(placeholder(family, i));
    try {
        return DistributionModel(family, std::move(values));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

ModelTemplate parse_model_template(std::string_view text) {
    const std::string s = normalize(text);
    const auto open = s.find('(');
    if (open == std::string::npos || s.empty() || s.back() != ')') {
        throw ParseError("model literal must look like family(name=value,...): '" + std::string(text) + "'");
    }
    ModelTemplate tmpl{parse_family(std::string_view(s).substr(0, open)), {}};
    tmpl.params.assign(param_count(tmpl.family), std::nullopt);

    std::string_view body(s);
    body = body.substr(open + 1, body.size() - open - 2);
    while (!body.empty()) {
        const auto comma = body.find(',');
        const auto item = body.substr(0, comma);
        body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
        if (item.empty()) throw ParseError("empty parameter in '" + std::string(text) + "'");
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected name=value, got '" + std::string(item) + "'");
        std::size_t index = 0;
        try {
            index = param_index(tmpl.family, item.substr(0, eq));
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what());
        }
        if (tmpl.params[index]) throw ParseError("duplicate parameter '" + std::string(item.substr(0, eq)) + "'");
        tmpl.params[index] = parse_number(item.substr(eq + 1));
    }
    tmpl.instantiate();  // validates the pinned values
    return tmpl;
}

DistributionModel parse_model(std::string_view text) {
    const auto tmpl = parse_model_template(text);
    if (!tmpl.free_indices().empty()) {
        throw ParseError("model literal '" + std::string(text) + "' leaves parameters unspecified");
    }
    return tmpl.instantiate();
}

std::string format_model(const DistributionModel& model) {
    std::ostringstream os;
    os.precision(17);
    os << family_name(model.family()) << '(';
    const auto names = param_names(model.family());
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) os << ',';
        os << names[i] << '=' << model.param(i);
    }
    os << ')';
    return os.str();
}

}  // namespace truncfit
