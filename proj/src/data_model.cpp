#include "kqic/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "kqic/errors.hpp"

namespace kqic {

namespace {

// Empty string when the triple is valid.
std::string check_triple(double entry, double observed, double event) {
    if (!std::isfinite(entry) || !std::isfinite(observed)) return "non-finite time";
    if (event != 0.0 && event != 1.0) {
        std::ostringstream os;
        os << "event value " << event << " not in {0,1}";
        return os.str();
    }
    if (entry < 0.0) return "negative entry time";
    if (!(entry < observed)) return "entry not < observed";
    return {};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

Dataset::Dataset(std::span<const Sample> samples, std::vector<std::string> groups) {
    if (!groups.empty() && groups.size() != samples.size()) {
        throw ArgumentError("group labels must match the number of samples");
    }
    std::vector<Violation> violations;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        auto msg = check_triple(s.entry, s.observed, s.event ? 1.0 : 0.0);
        if (!msg.empty()) violations.push_back({i, std::move(msg)});
    }
    if (!violations.empty()) throw ValidationError(std::move(violations));

    entry_.reserve(samples.size());
    observed_.reserve(samples.size());
    event_.reserve(samples.size());
    for (const auto& s : samples) {
        entry_.push_back(s.entry);
        observed_.push_back(s.observed);
        event_.push_back(s.event ? 1 : 0);
    }
    groups_ = std::move(groups);
}

Dataset Dataset::validate(std::span<const RawTriple> raw) {
    std::vector<Violation> violations;
    std::vector<Sample> samples;
    samples.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto& r = raw[i];
        auto msg = check_triple(r.entry, r.observed, r.event);
        if (!msg.empty()) violations.push_back({i, std::move(msg)});
        samples.push_back({r.entry, r.observed, r.event == 1.0});
    }
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return Dataset(samples);
}

std::size_t Dataset::event_count() const noexcept {
    return static_cast<std::size_t>(std::count(event_.begin(), event_.end(), 1));
}

std::vector<Sample> Dataset::samples() const {
    std::vector<Sample> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = sample(i);
    return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset d;
    d.entry_.reserve(indices.size());
    d.observed_.reserve(indices.size());
    d.event_.reserve(indices.size());
    for (auto i : indices) {
        if (i >= size()) throw ArgumentError("subset index out of range");
        d.entry_.push_back(entry_[i]);
        d.observed_.push_back(observed_[i]);
        d.event_.push_back(event_[i]);
        if (has_groups()) d.groups_.push_back(groups_[i]);
    }
    return d;
}

Dataset Dataset::with_entries(std::span<const double> entries) const {
    if (entries.size() != size()) throw ArgumentError("entry vector has wrong length");
    std::vector<Sample> s = samples();
    for (std::size_t i = 0; i < s.size(); ++i) s[i].entry = entries[i];
    return Dataset(s, groups_);
}

std::vector<std::pair<std::string, Dataset>> Dataset::split_by_group() const {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> buckets;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        auto it = std::find_if(buckets.begin(), buckets.end(),
                               [&](const auto& b) { return b.first == groups_[i]; });
        if (it == buckets.end()) {
            buckets.push_back({groups_[i], {}});
            it = std::prev(buckets.end());
        }
        it->second.push_back(i);
    }
    std::vector<std::pair<std::string, Dataset>> out;
    out.reserve(buckets.size());
    for (auto& [label, idx] : buckets) out.emplace_back(label, subset(idx));
    return out;
}

DatasetSummary summarize(const Dataset& d) {
    DatasetSummary s;
    s.n = d.size();
    s.events = d.event_count();
    if (s.n == 0) return s;
    s.event_fraction = static_cast<double>(s.events) / static_cast<double>(s.n);
    s.censoring_fraction = 1.0 - s.event_fraction;
    auto [emin, emax] = std::minmax_element(d.entries().begin(), d.entries().end());
    auto [omin, omax] =
        std::minmax_element(d.observed_times().begin(), d.observed_times().end());
    s.entry_min = *emin;
    s.entry_max = *emax;
    s.observed_min = *omin;
    s.observed_max = *omax;
    return s;
}

Dataset load_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError(1, "missing header row");
    ++line_no;
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = split_fields(line);
    auto column = [&](const std::string& name) -> long {
        if (name.empty()) return -1;
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) return static_cast<long>(c);
        }
        return -1;
    };
    const long c_entry = column(schema.entry);
    const long c_time = column(schema.time);
    const long c_event = column(schema.event);
    const long c_group = column(schema.group);
    if (c_entry < 0 || c_time < 0 || c_event < 0) {
        throw ParseError(1, "header must contain columns '" + schema.entry + "', '" +
                                schema.time + "', '" + schema.event + "'");
    }
    const auto needed =
        static_cast<std::size_t>(std::max({c_entry, c_time, c_event, c_group})) + 1;

    std::vector<Sample> samples;
    std::vector<std::string> groups;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split_fields(line);
        if (f.size() < needed) throw ParseError(line_no, "expected at least " +
                                                             std::to_string(needed) + " fields");
        RawTriple r;
        if (!parse_double(f[c_entry], r.entry)) throw ParseError(line_no, "non-numeric entry");
        if (!parse_double(f[c_time], r.observed)) throw ParseError(line_no, "non-numeric time");
        if (!parse_double(f[c_event], r.event)) throw ParseError(line_no, "non-numeric event");
        if (r.event != 0.0 && r.event != 1.0) throw ParseError(line_no, "event not in {0,1}");
        if (auto msg = check_triple(r.entry, r.observed, r.event); !msg.empty()) {
            throw ParseError(line_no, msg);
        }
        samples.push_back({r.entry, r.observed, r.event == 1.0});
        if (c_group >= 0) groups.emplace_back(f[c_group]);
    }
    return Dataset(samples, std::move(groups));
}

Dataset load_csv_file(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return load_csv(in, schema);
}

void write_csv(const Dataset& d, std::ostream& out) {
    out << (d.has_groups() ? "entry,time,event,group\n" : "entry,time,event\n");
    char buf[64];
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", d.entry(i));
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", d.observed(i));
        out << buf << ',' << (d.event(i) ? 1 : 0);
        if (d.has_groups()) out << ',' << d.groups()[i];
        out << '\n';
    }
}

}  // namespace kqic
