#include "truncfit/frequency_table.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "truncfit/error.hpp"

namespace truncfit {

namespace {

bool same_point(double a, double b) noexcept {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_field(std::string_view s, std::size_t line) {
    s = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("line " + std::to_string(line) + ": invalid number '" + std::string(s) + "'");
    }
    return v;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

FrequencyTable::FrequencyTable(std::vector<double> points, std::vector<double> counts,
                               std::optional<double> full_size, std::optional<double> bin_width)
    : points_(std::move(points)), counts_(std::move(counts)), full_size_(full_size), bin_width_(bin_width) {
    if (points_.empty()) throw InvalidArgument("frequency table needs at least one row");
    if (points_.size() != counts_.size()) throw InvalidArgument("points and counts differ in length");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i])) throw InvalidArgument("non-finite support point");
        if (i > 0 && !(points_[i] > points_[i - 1])) {
            throw InvalidArgument("support points must be strictly increasing (row " + std::to_string(i + 1) + ")");
        }
        if (!std::isfinite(counts_[i]) || counts_[i] < 0.0) {
            throw InvalidArgument("counts must be finite and nonnegative (row " + std::to_string(i + 1) + ")");
        }
    }
    total_ = std::accumulate(counts_.begin(), counts_.end(), 0.0);
    if (full_size_ && !(*full_size_ > 0.0 && *full_size_ >= total_ - 1e-9)) {
        throw InvalidArgument("full sample size must be positive and at least the truncated size");
    }
    if (bin_width_ && !(*bin_width_ > 0.0)) throw InvalidArgument("bin width must be positive");
}

std::optional<double> FrequencyTable::truncation_proportion() const {
    if (!full_size_) return std::nullopt;
    return 100.0 * (*full_size_ - total_) / *full_size_;
}

double FrequencyTable::mean() const {
    if (total_ <= 0.0) throw InvalidArgument("mean of an all-zero table");
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += points_[i] * counts_[i];
    return s / total_;
}

std::optional<std::size_t> FrequencyTable::find(double x) const noexcept {
    auto it = std::lower_bound(points_.begin(), points_.end(), x,
                               [](double p, double v) { return p < v && !same_point(p, v); });
    if (it != points_.end() && same_point(*it, x)) return static_cast<std::size_t>(it - points_.begin());
    return std::nullopt;
}

FrequencyTable FrequencyTable::with_full_size(std::optional<double> n) const {
    return FrequencyTable(points_, counts_, n, bin_width_);
}

FrequencyTable FrequencyTable::scaled(double factor) const {
    if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
    auto c = counts_;
    for (double& v : c) v *= factor;
    return FrequencyTable(points_, std::move(c), std::nullopt, bin_width_);
}

FrequencyTable bin_sample(std::span<const double> sample, std::size_t num_bins) {
    if (sample.empty()) throw InvalidArgument("bin_sample: empty sample");
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    return bin_sample(sample, num_bins, *lo, *hi);
}

FrequencyTable bin_sample(std::span<const double> sample, std::size_t num_bins, double lo, double hi) {
    if (sample.empty()) throw InvalidArgument("bin_sample: empty sample");
    if (num_bins == 0) throw InvalidArgument("bin_sample: number of bins must be positive");
    if (!(hi >= lo)) throw InvalidArgument("bin_sample: empty range");
    if (hi == lo) {
        double n = 0.0;
        for (double x : sample) n += (x == lo) ? 1.0 : 0.0;
        return FrequencyTable({lo}, {n}, double(sample.size()));
    }
    const double width = (hi - lo) / double(num_bins);
    std::vector<double> points(num_bins), counts(num_bins, 0.0);
    for (std::size_t i = 0; i < num_bins; ++i) points[i] = lo + (double(i) + 0.5) * width;
    for (double x : sample) {
        if (x < lo || x > hi) continue;
        auto idx = static_cast<std::size_t>(std::floor((x - lo) / width));
        counts[std::min(idx, num_bins - 1)] += 1.0;
    }
    return FrequencyTable(std::move(points), std::move(counts), double(sample.size()), width);
}

FrequencyTable tabulate(std::span<const double> sample) {
    if (sample.empty()) throw InvalidArgument("tabulate: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> points, counts;
    for (double x : sorted) {
        if (!points.empty() && points.back() == x) {
            counts.back() += 1.0;
        } else {
            points.push_back(x);
            counts.push_back(1.0);
        }
    }
    return FrequencyTable(std::move(points), std::move(counts), double(sample.size()));
}

FrequencyTable truncate(const FrequencyTable& table, const Truncation& trunc, bool preserve_full_size) {
    if (trunc.kept_points.empty()) throw InvalidArgument("truncation keeps no points");
    std::vector<std::size_t> idx;
    for (double x : trunc.kept_points) {
        auto i = table.find(x);
        if (!i) {
            std::ostringstream os;
            os << "truncation point " << x << " is not in the table";
            throw InvalidArgument(os.str());
        }
        idx.push_back(*i);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<double> points, counts;
    for (auto i : idx) {
        points.push_back(table.points()[i]);
        counts.push_back(table.counts()[i]);
    }
    return FrequencyTable(std::move(points), std::move(counts),
                          preserve_full_size ? table.full_size() : std::nullopt, table.bin_width());
}

Truncation rows(const FrequencyTable& table, std::initializer_list<std::size_t> one_based) {
    Truncation t;
    for (auto r : one_based) {
        if (r == 0 || r > table.size()) throw InvalidArgument("row index out of range");
        t.kept_points.push_back(table.points()[r - 1]);
    }
    return t;
}

FrequencyTable drop_zero(const FrequencyTable& table) {
    std::vector<double> points, counts;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table.counts()[i] > 0.0) {
            points.push_back(table.points()[i]);
            counts.push_back(table.counts()[i]);
        }
    }
    if (points.empty()) throw InvalidArgument("drop_zero: every count is zero");
    return FrequencyTable(std::move(points), std::move(counts), table.full_size(), table.bin_width());
}

EmpiricalTruncated empirical_truncated(const FrequencyTable& table) {
    EmpiricalTruncated out{table.points(), {}};
    out.probs.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!(table.counts()[i] > 0.0)) {
            std::ostringstream os;
            os << "zero count at point " << table.points()[i] << "; apply drop_zero first";
            throw InvalidArgument(os.str());
        }
        out.probs.push_back(table.counts()[i] / table.total());
    }
    return out;
}

FrequencyTable parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    bool header_seen = false;
    std::vector<double> points, counts;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = trim(raw);
        if (s.empty() || s.front() == '#') continue;
        if (!header_seen) {
            std::string lowered;
            for (char c : s) {
                if (!std::isspace(static_cast<unsigned char>(c))) lowered.push_back(char(std::tolower((unsigned char)c)));
            }
            if (lowered != "point,count") throw ParseError("expected header 'point,count'");
            header_seen = true;
            continue;
        }
        const auto comma = s.find(',');
        if (comma == std::string_view::npos || s.find(',', comma + 1) != std::string_view::npos) {
            throw ParseError("line " + std::to_string(line) + ": expected two fields");
        }
        const double p = parse_field(s.substr(0, comma), line);
        const double c = parse_field(s.substr(comma + 1), line);
        if (c < 0.0) throw ParseError("line " + std::to_string(line) + ": negative count");
        if (!points.empty() && !(p > points.back())) {
            throw ParseError("line " + std::to_string(line) + ": points must be strictly increasing");
        }
        points.push_back(p);
        counts.push_back(c);
    }
    if (!header_seen || points.empty()) throw ParseError("CSV contains no rows");
    return FrequencyTable(std::move(points), std::move(counts));
}

FrequencyTable load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

std::string to_csv(const FrequencyTable& table) {
    std::string out = "point,count\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        out += format_double(table.points()[i]);
        out += ',';
        out += format_double(table.counts()[i]);
        out += '\n';
    }
    return out;
}

void save_csv(const FrequencyTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << to_csv(table);
}

std::vector<double> load_sample(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<double> out;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto s = trim(raw);
        if (s.empty() || s.front() == '#') continue;
        out.push_back(parse_field(s, line));
    }
    if (out.empty()) throw ParseError(path.string() + " contains no values");
    return out;
}

}  // namespace truncfit
