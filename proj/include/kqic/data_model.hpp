#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kqic {

/// One subject: entry time X, observed time T = min(Y, C), event flag
/// (true iff T is the survival time Y). Requires 0 <= entry < observed.
struct Sample {
    double entry = 0.0;
    double observed = 0.0;
    bool event = false;
};

// Unvalidated input triple; the event value is kept numeric so that values
// outside {0,1} can be reported.
struct RawTriple {
    double entry = 0.0;
    double observed = 0.0;
    double event = 0.0;
};

/// Immutable, validated collection of samples with an optional per-sample
/// group label. Stored column-wise.
class Dataset {
public:
    Dataset() = default;

    /// Validates every sample; throws ValidationError listing all violations.
    explicit Dataset(std::span<const Sample> samples, std::vector<std::string> groups = {});

    static Dataset validate(std::span<const RawTriple> raw);

    std::size_t size() const noexcept { return entry_.size(); }
    bool empty() const noexcept { return entry_.empty(); }

    double entry(std::size_t i) const { return entry_[i]; }
    double observed(std::size_t i) const { return observed_[i]; }
    bool event(std::size_t i) const { return event_[i] != 0; }
    Sample sample(std::size_t i) const { return {entry_[i], observed_[i], event_[i] != 0}; }

    std::span<const double> entries() const noexcept { return entry_; }
    std::span<const double> observed_times() const noexcept { return observed_; }
    std::span<const unsigned char> events() const noexcept { return event_; }

    bool has_groups() const noexcept { return !groups_.empty(); }
    const std::vector<std::string>& groups() const noexcept { return groups_; }

    std::size_t event_count() const noexcept;
    std::vector<Sample> samples() const;

    /// Samples at the given positions, in the given order.
    Dataset subset(std::span<const std::size_t> indices) const;

    /// Same (observed, event) pairs with entry times replaced; validated.
    Dataset with_entries(std::span<const double> entries) const;

    /// Splits by group label, in order of first appearance.
    std::vector<std::pair<std::string, Dataset>> split_by_group() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<double> entry_;
    std::vector<double> observed_;
    std::vector<unsigned char> event_;
    std::vector<std::string> groups_;
};

struct DatasetSummary {
    std::size_t n = 0;
    std::size_t events = 0;
    double event_fraction = 0.0;
    double censoring_fraction = 0.0;
    double entry_min = 0.0, entry_max = 0.0;
    double observed_min = 0.0, observed_max = 0.0;
};

DatasetSummary summarize(const Dataset& dataset);

/// Column names used by load_csv. An empty group column disables groups.
struct CsvSchema {
    std::string entry = "entry";
    std::string time = "time";
    std::string event = "event";
    std::string group = "group";
};

/// Parses UTF-8 CSV with a header row (LF or CRLF). Throws ParseError with
/// the 1-based line number for malformed rows and for invariant violations.
Dataset load_csv(std::istream& in, const CsvSchema& schema = {});
Dataset load_csv_file(const std::string& path, const CsvSchema& schema = {});

/// Writes `entry,time,event[,group]` with 17 significant digits.
void write_csv(const Dataset& dataset, std::ostream& out);

}  // namespace kqic
