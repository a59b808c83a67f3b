#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace oslr {

/// One right-censored record: observed time min(T, C) and event indicator.
struct Observation {
    double time;
    bool event;
};

/// Throws ValidationError if time is not finite and positive.
void validate(const Observation& obs, std::size_t row = 0);

/// Immutable group of observations (historical control A or experimental B).
class Cohort {
public:
    Cohort(std::vector<Observation> observations, std::string label = {});

    std::span<const Observation> observations() const noexcept { return observations_; }
    const std::string& label() const noexcept { return label_; }
    std::size_t size() const noexcept { return observations_.size(); }
    std::size_t n_events() const noexcept { return n_events_; }
    double max_time() const noexcept { return max_time_; }
    double total_time() const noexcept { return total_time_; }

    const Observation& operator[](std::size_t i) const { return observations_[i]; }
    auto begin() const noexcept { return observations_.cbegin(); }
    auto end() const noexcept { return observations_.cend(); }

private:
    std::vector<Observation> observations_;
    std::string label_;
    std::size_t n_events_ = 0;
    double max_time_ = 0.0;
    double total_time_ = 0.0;
};

/// Maximum follow-up time of a study. All analysis times lie in (0, t_max].
class StudyHorizon {
public:
    explicit StudyHorizon(double t_max);
    double t_max() const noexcept { return t_max_; }

    /// Largest observed time across the given cohorts.
    static StudyHorizon from_cohorts(std::span<const Cohort* const> cohorts);

    /// Throws ValidationError if some observation lies beyond the horizon.
    void check(const Cohort& cohort) const;

private:
    double t_max_;
};

struct CountingProcessValue {
    std::size_t events;   ///< N(t) = #{time <= t, event}
    std::size_t at_risk;  ///< Y(t) = #{time >= t}
};

/// Event count and at-risk count of a cohort at time t >= 0.
CountingProcessValue counting_process(const Cohort& cohort, double t);

/// Column mapping used by ingest_csv.
struct CsvSchema {
    std::string time_column = "time";
    std::string event_column = "event";
    /// When set and present in the header, rows are split by this column.
    std::optional<std::string> group_column = std::string("group");
};

/// Cohorts keyed by group label, in order of first appearance.
using CohortSet = std::vector<Cohort>;

/// Reads a comma separated file. Without a group column a single cohort
/// labelled "" is returned.
CohortSet ingest_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
CohortSet parse_csv(std::istream& in, const CsvSchema& schema = {});

/// Writes `time,event[,group]` rows with shortest round-trip decimal formatting.
void write_csv(std::ostream& out, std::span<const Cohort> cohorts, bool with_group);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Finds the cohort with the given label, throwing UsageError when missing.
const Cohort& find_cohort(const CohortSet& cohorts, const std::string& label);

}  // namespace oslr
