#pragma once

#include <ctime>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hammer/duration.hpp"
#include "hammer/metrics.hpp"
#include "hammer/records.hpp"
#include "hammer/resources.hpp"

namespace hammer {

struct ProfileSummary {
    uint64_t index = 0;
    uint64_t produced = 0;
    uint64_t included = 0;
    uint64_t failed_timeout = 0;
    uint64_t rejected = 0;
    Duration wall_time;
    std::optional<double> tps;
    LatencyStats latency;
    std::vector<uint64_t> node_submitted;

    friend bool operator==(const ProfileSummary&, const ProfileSummary&) = default;
};

struct RunSummary {
    int64_t started_at_unix = 0;  // calendar seconds, rendered in local time
    Duration total_execution;
    std::vector<ProfileSummary> profiles;
    std::optional<double> tps_overall;
    LatencyStats latency;                   // write-workload receipts
    std::optional<LatencyStats> read_latency;
    std::vector<ResourceSample> resources;

    friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

class ReportParseError : public std::runtime_error {
public:
    explicit ReportParseError(const std::string& what) : std::runtime_error(what) {}
};

/// "DD_MM_YY-HH_MM.log", zero-padded, 24-hour clock, local time.
std::string log_filename(const std::tm& started);
std::string log_filename(int64_t started_at_unix);

/// Paths for one run's outputs, all inside a directory named by the log
/// file's stem.
struct ReportPaths {
    std::filesystem::path dir;
    std::filesystem::path log;
    std::filesystem::path summary_json;
    std::filesystem::path records_csv;
    std::filesystem::path line_protocol;
    std::string stem;
};

/// Creates out_root/<stem>/ for this run. A second run in the same minute
/// collides on the name; collisions append "-2", "-3", ... to the stem.
ReportPaths prepare_run_dir(const std::filesystem::path& out_root, int64_t started_at_unix);

/// Human-readable block: total time, per-profile wall time and counts, TPS,
/// latency. Total on any structurally valid summary.
std::string render_summary(const RunSummary& summary);

/// Canonical JSON with stable key order; absent optionals are omitted, not
/// null; durations use the "1m30s" string form. import_json(export_json(s))
/// == s for any well-formed summary.
std::string export_json(const RunSummary& summary);
RunSummary import_json(const std::string& document);

/// One row per TxRecord: seq,profile,node,submit_ns,status,latency_ns
/// (latency empty unless included).
std::string export_csv(std::span<const ProfileResult> profiles);

/// Line protocol, one point per line:
///   <measurement>,node=<label> value=<decimal> <timestamp-ns>
/// Measurements: tps (at block timestamp), cpu_percent and rss_bytes (at
/// sample time). Spaces, commas and equals signs in the label are escaped.
std::string export_line_protocol(std::span<const TpsSample> tps,
                                 std::span<const ResourceSample> resources,
                                 const std::string& node_label);

/// POSTs a line-protocol body; true on a 2xx response.
bool post_metrics(const std::string& url, const std::string& body);

}  // namespace hammer
