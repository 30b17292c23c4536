#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "truncfit/estimation.hpp"
#include "truncfit/gof.hpp"
#include "truncfit/mixture.hpp"
#include "truncfit/selection.hpp"

namespace truncfit {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

/// What a CLI command writes with --json.
struct ReportDocument {
    std::vector<std::string> command;
    std::string input_digest;  ///< FNV-1a 64 of the input files, hex
    std::vector<EstimationReport> reports;
    Json result;  ///< command-specific payload (selection, gof, mixture, ...)
    std::vector<std::string> warnings;

    Json to_json() const;
    static ReportDocument from_json(const Json& j);
    bool operator==(const ReportDocument&) const;
};

/// FNV-1a 64 over the bytes of each file, in order, as 16 hex digits.
std::string digest_files(std::span<const std::filesystem::path> paths);
std::string digest_bytes(std::string_view bytes);

Json to_json(const DistributionModel& model);
DistributionModel model_from_json(const Json& j);
Json to_json(const EstimationReport& report);
EstimationReport report_from_json(const Json& j);
Json to_json(const SelectionResult& result);
Json to_json(const ExperimentResult& result);
Json to_json(const GofResult& result);
Json to_json(const FrequencyTable& table);
Json to_json(const MixtureInit& init);

bool same_report(const EstimationReport& a, const EstimationReport& b);

}  // namespace truncfit
