#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace truncfit {

struct ReproCheck {
    enum class Kind { Within, AtLeast };
    std::string label;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;  ///< Within only
    Kind kind = Kind::Within;

    bool pass() const;
};

struct ReproTable {
    std::string id;
    std::string title;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<ReproCheck> checks;
    double seconds = 0.0;

    bool passed() const;
    std::size_t failures() const;
};

struct ReproOptions {
    std::filesystem::path data_dir;
    bool fast = false;      ///< selection experiments with the reduced replication count
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// Ids accepted by reproduce(): T2 T4 T6 T7 T8 hartley mixture selection.
std::span<const std::string_view> reproduce_ids();

/// Regenerates one published table from the fixtures in data_dir and compares
/// it with data_dir/expectations.json. Throws InvalidArgument on an unknown id
/// and on missing fixtures.
ReproTable reproduce(std::string_view id, const ReproOptions& options);

/// Aligned plain-text rendering followed by one line per failed check.
std::string format_table(const ReproTable& table);

}  // namespace truncfit
