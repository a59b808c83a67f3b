#include "oslr/survival_data.hpp"

#include "oslr/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace oslr {

void validate(const Observation& obs, std::size_t row)
{
    if (!std::isfinite(obs.time) || obs.time <= 0.0) {
        std::ostringstream msg;
        msg << "time must be finite and positive";
        if (row > 0) msg << " (row " << row << ")";
        throw ValidationError(msg.str(), row);
    }
}

Cohort::Cohort(std::vector<Observation> observations, std::string label)
    : observations_(std::move(observations)), label_(std::move(label))
{
    if (observations_.empty()) throw ValidationError("cohort must contain at least one observation");
    for (std::size_t i = 0; i < observations_.size(); ++i) {
        const auto& obs = observations_[i];
        validate(obs, i + 1);
        n_events_ += obs.event ? 1 : 0;
        max_time_ = std::max(max_time_, obs.time);
        total_time_ += obs.time;
    }
}

StudyHorizon::StudyHorizon(double t_max) : t_max_(t_max)
{
    if (!std::isfinite(t_max) || t_max <= 0.0)
        throw DomainError("horizon must be finite and positive");
}

StudyHorizon StudyHorizon::from_cohorts(std::span<const Cohort* const> cohorts)
{
    double t = 0.0;
    for (const Cohort* c : cohorts) t = std::max(t, c->max_time());
    return StudyHorizon(t);
}

void StudyHorizon::check(const Cohort& cohort) const
{
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        if (cohort[i].time > t_max_) {
            throw ValidationError("observation at row " + std::to_string(i + 1) +
                                      " exceeds the study horizon",
                                  i + 1);
        }
    }
}

CountingProcessValue counting_process(const Cohort& cohort, double t)
{
    if (!(t >= 0.0)) throw DomainError("counting_process requires t >= 0");
    CountingProcessValue v{0, 0};
    for (const auto& obs : cohort) {
        if (obs.event && obs.time <= t) ++v.events;
        if (obs.time >= t) ++v.at_risk;
    }
    return v;
}

namespace {

std::string trim(std::string_view s)
{
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_time(const std::string& field, std::size_t row)
{
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        throw ValidationError("row " + std::to_string(row) + ": time '" + field +
                                  "' is not a decimal number",
                              row);
    }
    return value;
}

bool parse_event(const std::string& field, std::size_t row)
{
    if (field == "1") return true;
    if (field == "0") return false;
    throw ValidationError("row " + std::to_string(row) + ": event must be 0 or 1, got '" + field + "'",
                          row);
}

}  // namespace

CohortSet parse_csv(std::istream& in, const CsvSchema& schema)
{
    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) throw SchemaError("missing CSV header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = split_fields(line);
    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto time_col = column(schema.time_column);
    const auto event_col = column(schema.event_column);
    if (!time_col) throw SchemaError("missing column '" + schema.time_column + "'");
    if (!event_col) throw SchemaError("missing column '" + schema.event_column + "'");
    std::optional<std::size_t> group_col;
    if (schema.group_column) group_col = column(*schema.group_column);

    std::vector<std::string> labels;
    std::vector<std::vector<Observation>> groups;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw ValidationError("row " + std::to_string(row) + ": expected " +
                                      std::to_string(header.size()) + " fields, got " +
                                      std::to_string(fields.size()),
                                  row);
        }
        Observation obs{parse_time(fields[*time_col], row), parse_event(fields[*event_col], row)};
        validate(obs, row);

        std::string label = group_col ? fields[*group_col] : std::string();
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) {
            labels.push_back(label);
            groups.emplace_back();
            it = labels.end() - 1;
        }
        groups[static_cast<std::size_t>(it - labels.begin())].push_back(obs);
    }
    if (groups.empty()) throw SchemaError("CSV contains no data rows");

    CohortSet cohorts;
    cohorts.reserve(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) cohorts.emplace_back(std::move(groups[g]), labels[g]);
    return cohorts;
}

CohortSet ingest_csv(const std::filesystem::path& path, const CsvSchema& schema)
{
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path.string() + "'");
    return parse_csv(in, schema);
}

std::string format_double(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, std::span<const Cohort> cohorts, bool with_group)
{
    out << (with_group ? "time,event,group\n" : "time,event\n");
    for (const auto& cohort : cohorts) {
        for (const auto& obs : cohort) {
            out << format_double(obs.time) << ',' << (obs.event ? 1 : 0);
            if (with_group) out << ',' << cohort.label();
            out << '\n';
        }
    }
}

const Cohort& find_cohort(const CohortSet& cohorts, const std::string& label)
{
    for (const auto& c : cohorts)
        if (c.label() == label) return c;
    throw UsageError("no group '" + label + "' in input");
}

}  // namespace oslr
