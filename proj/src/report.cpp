#include "hammer/report.hpp"

#include <httplib.h>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hammer/rpc_codec.hpp"  // wire_json

namespace hammer {

namespace {

/// Plain decimal with no exponent; integral values print without a fraction.
std::string fmt_decimal(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    std::string s = buf;
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

std::string escape_tag(const std::string& value) {
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        if (c == ' ' || c == ',' || c == '=') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string fmt_ms(int64_t ns) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3fms", static_cast<double>(ns) / 1e6);
    return buf;
}

std::string render_latency(const LatencyStats& s) {
    if (s.count == 0) return "none";
    std::ostringstream out;
    out << "count=" << s.count << " min=" << fmt_ms(s.min_ns) << " p50=" << fmt_ms(s.p50_ns)
        << " p95=" << fmt_ms(s.p95_ns) << " p99=" << fmt_ms(s.p99_ns)
        << " max=" << fmt_ms(s.max_ns) << " mean=" << fmt_ms(static_cast<int64_t>(s.mean_ns));
    return out.str();
}

wire_json latency_to_json(const LatencyStats& s) {
    wire_json obj;
    obj["count"] = s.count;
    if (s.count > 0) {
        obj["minNs"] = s.min_ns;
        obj["maxNs"] = s.max_ns;
        obj["meanNs"] = s.mean_ns;
        obj["p50Ns"] = s.p50_ns;
        obj["p95Ns"] = s.p95_ns;
        obj["p99Ns"] = s.p99_ns;
    }
    return obj;
}

void expect_keys(const wire_json& obj, std::initializer_list<const char*> known,
                 const char* where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ReportParseError(std::string(where) + ": unknown key \"" + key + "\"");
    }
}

LatencyStats latency_from_json(const wire_json& obj, const char* where) {
    if (!obj.is_object() || !obj.contains("count")) {
        throw ReportParseError(std::string(where) + ": malformed latency object");
    }
    expect_keys(obj, {"count", "minNs", "maxNs", "meanNs", "p50Ns", "p95Ns", "p99Ns"}, where);
    LatencyStats s;
    s.count = obj["count"].get<uint64_t>();
    if (s.count > 0) {
        s.min_ns = obj["minNs"].get<int64_t>();
        s.max_ns = obj["maxNs"].get<int64_t>();
        s.mean_ns = obj["meanNs"].get<double>();
        s.p50_ns = obj["p50Ns"].get<int64_t>();
        s.p95_ns = obj["p95Ns"].get<int64_t>();
        s.p99_ns = obj["p99Ns"].get<int64_t>();
    }
    return s;
}

Duration duration_from_json(const wire_json& obj, const char* key, const char* where) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw ReportParseError(std::string(where) + ": missing duration \"" + key + "\"");
    }
    try {
        return parse_duration(obj[key].get<std::string>());
    } catch (const DurationParseError& e) {
        throw ReportParseError(std::string(where) + "." + key + ": " + e.what());
    }
}

}  // namespace

std::string to_string(TxStatus status) {
    switch (status) {
        case TxStatus::pending: return "pending";
        case TxStatus::included: return "included";
        case TxStatus::failed_timeout: return "failed_timeout";
        case TxStatus::rejected: return "rejected";
    }
    return "unknown";
}

std::string log_filename(const std::tm& started) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%02d_%02d_%02d-%02d_%02d.log", started.tm_mday,
                  started.tm_mon + 1, started.tm_year % 100, started.tm_hour, started.tm_min);
    return buf;
}

std::string log_filename(int64_t started_at_unix) {
    const time_t t = static_cast<time_t>(started_at_unix);
    std::tm tm_local{};
    localtime_r(&t, &tm_local);
    return log_filename(tm_local);
}

ReportPaths prepare_run_dir(const std::filesystem::path& out_root, int64_t started_at_unix) {
    const std::string base = log_filename(started_at_unix);
    const std::string base_stem = base.substr(0, base.size() - 4);

    std::string stem = base_stem;
    for (int n = 2; std::filesystem::exists(out_root / stem); ++n) {
        stem = base_stem + "-" + std::to_string(n);
    }

    ReportPaths paths;
    paths.stem = stem;
    paths.dir = out_root / stem;
    std::filesystem::create_directories(paths.dir);
    paths.log = paths.dir / (stem + ".log");
    paths.summary_json = paths.dir / "summary.json";
    paths.records_csv = paths.dir / "records.csv";
    paths.line_protocol = paths.dir / "metrics.lp";
    return paths;
}

std::string render_summary(const RunSummary& summary) {
    std::ostringstream out;
    uint64_t produced = 0, included = 0, failed = 0, rejected = 0;
    for (const auto& p : summary.profiles) {
        produced += p.produced;
        included += p.included;
        failed += p.failed_timeout;
        rejected += p.rejected;
    }

    const time_t t = static_cast<time_t>(summary.started_at_unix);
    std::tm tm_local{};
    localtime_r(&t, &tm_local);
    char when[32];
    std::strftime(when, sizeof(when), "%Y-%m-%d %H:%M:%S", &tm_local);

    out << "== run summary ==\n";
    out << "started:          " << when << "\n";
    out << "total execution:  " << format_duration(summary.total_execution) << "\n";
    out << "profiles:         " << summary.profiles.size() << "\n";
    out << "total produced:   " << produced << "\n";
    out << "total included:   " << included << "\n";
    out << "total failed_timeout: " << failed << "\n";
    out << "total rejected:   " << rejected << "\n";
    out << "overall tps:      "
        << (summary.tps_overall ? fmt_decimal(*summary.tps_overall) : "n/a") << "\n";
    out << "tx latency:       " << render_latency(summary.latency) << "\n";
    if (summary.read_latency) {
        out << "read latency:     " << render_latency(*summary.read_latency) << "\n";
    }

    for (const auto& p : summary.profiles) {
        out << "\n-- profile " << p.index << " --\n";
        out << "produced:        " << p.produced << "\n";
        out << "included:        " << p.included << "\n";
        out << "failed_timeout:  " << p.failed_timeout << "\n";
        out << "rejected:        " << p.rejected << "\n";
        out << "wall time:       " << format_duration(p.wall_time) << "\n";
        out << "tps:             " << (p.tps ? fmt_decimal(*p.tps) : "n/a") << "\n";
        out << "latency:         " << render_latency(p.latency) << "\n";
    }
    return out.str();
}

std::string export_json(const RunSummary& summary) {
    wire_json root;
    root["startedAtUnix"] = summary.started_at_unix;
    root["totalExecution"] = format_duration(summary.total_execution);
    if (summary.tps_overall) root["tpsOverall"] = *summary.tps_overall;
    root["latency"] = latency_to_json(summary.latency);
    if (summary.read_latency) root["readLatency"] = latency_to_json(*summary.read_latency);

    root["profiles"] = wire_json::array();
    for (const auto& p : summary.profiles) {
        wire_json obj;
        obj["index"] = p.index;
        obj["produced"] = p.produced;
        obj["included"] = p.included;
        obj["failedTimeout"] = p.failed_timeout;
        obj["rejected"] = p.rejected;
        obj["wallTime"] = format_duration(p.wall_time);
        if (p.tps) obj["tps"] = *p.tps;
        obj["latency"] = latency_to_json(p.latency);
        obj["nodeSubmissions"] = p.node_submitted;
        root["profiles"].push_back(std::move(obj));
    }

    root["resources"] = wire_json::array();
    for (const auto& r : summary.resources) {
        wire_json obj;
        obj["atNs"] = r.at_ns;
        if (r.cpu_percent) obj["cpuPercent"] = *r.cpu_percent;
        if (r.rss_bytes) obj["rssBytes"] = *r.rss_bytes;
        if (r.net_rx_bytes) obj["netRxBytes"] = *r.net_rx_bytes;
        if (r.net_tx_bytes) obj["netTxBytes"] = *r.net_tx_bytes;
        root["resources"].push_back(std::move(obj));
    }
    return root.dump(2) + "\n";
}

RunSummary import_json(const std::string& document) {
    const auto root = wire_json::parse(document, nullptr, false);
    if (root.is_discarded() || !root.is_object()) {
        throw ReportParseError("summary is not a JSON object");
    }
    expect_keys(root,
                {"startedAtUnix", "totalExecution", "tpsOverall", "latency", "readLatency",
                 "profiles", "resources"},
                "summary");
    if (!root.contains("startedAtUnix") || !root["startedAtUnix"].is_number_integer()) {
        throw ReportParseError("summary: missing startedAtUnix");
    }

    RunSummary summary;
    summary.started_at_unix = root["startedAtUnix"].get<int64_t>();
    summary.total_execution = duration_from_json(root, "totalExecution", "summary");
    if (root.contains("tpsOverall")) summary.tps_overall = root["tpsOverall"].get<double>();
    if (!root.contains("latency")) throw ReportParseError("summary: missing latency");
    summary.latency = latency_from_json(root["latency"], "summary.latency");
    if (root.contains("readLatency")) {
        summary.read_latency = latency_from_json(root["readLatency"], "summary.readLatency");
    }

    if (!root.contains("profiles") || !root["profiles"].is_array()) {
        throw ReportParseError("summary: missing profiles array");
    }
    for (const auto& obj : root["profiles"]) {
        expect_keys(obj,
                    {"index", "produced", "included", "failedTimeout", "rejected", "wallTime",
                     "tps", "latency", "nodeSubmissions"},
                    "profile");
        ProfileSummary p;
        p.index = obj.at("index").get<uint64_t>();
        p.produced = obj.at("produced").get<uint64_t>();
        p.included = obj.at("included").get<uint64_t>();
        p.failed_timeout = obj.at("failedTimeout").get<uint64_t>();
        p.rejected = obj.at("rejected").get<uint64_t>();
        p.wall_time = duration_from_json(obj, "wallTime", "profile");
        if (obj.contains("tps")) p.tps = obj["tps"].get<double>();
        if (!obj.contains("latency")) throw ReportParseError("profile: missing latency");
        p.latency = latency_from_json(obj["latency"], "profile.latency");
        if (obj.contains("nodeSubmissions")) {
            p.node_submitted = obj["nodeSubmissions"].get<std::vector<uint64_t>>();
        }
        summary.profiles.push_back(std::move(p));
    }

    if (root.contains("resources")) {
        if (!root["resources"].is_array()) throw ReportParseError("summary: resources not an array");
        for (const auto& obj : root["resources"]) {
            expect_keys(obj, {"atNs", "cpuPercent", "rssBytes", "netRxBytes", "netTxBytes"},
                        "resource");
            ResourceSample r;
            r.at_ns = obj.at("atNs").get<int64_t>();
            if (obj.contains("cpuPercent")) r.cpu_percent = obj["cpuPercent"].get<double>();
            if (obj.contains("rssBytes")) r.rss_bytes = obj["rssBytes"].get<uint64_t>();
            if (obj.contains("netRxBytes")) r.net_rx_bytes = obj["netRxBytes"].get<uint64_t>();
            if (obj.contains("netTxBytes")) r.net_tx_bytes = obj["netTxBytes"].get<uint64_t>();
            summary.resources.push_back(r);
        }
    }
    return summary;
}

std::string export_csv(std::span<const ProfileResult> profiles) {
    std::ostringstream out;
    out << "seq,profile,node,submit_ns,status,latency_ns\n";
    for (const auto& profile : profiles) {
        for (const auto& rec : profile.records) {
            out << rec.seq << ',' << rec.profile_index << ',' << rec.node_index << ','
                << rec.submit_ns << ',' << to_string(rec.status) << ',';
            if (const auto lat = rec.latency_ns()) out << *lat;
            out << '\n';
        }
    }
    return out.str();
}

std::string export_line_protocol(std::span<const TpsSample> tps,
                                 std::span<const ResourceSample> resources,
                                 const std::string& node_label) {
    const std::string label = escape_tag(node_label);
    std::ostringstream out;
    for (const auto& s : tps) {
        out << "tps,node=" << label << " value=" << fmt_decimal(s.tps()) << ' '
            << s.block_timestamp * 1'000'000'000ULL << '\n';
    }
    for (const auto& r : resources) {
        if (r.cpu_percent) {
            out << "cpu_percent,node=" << label << " value=" << fmt_decimal(*r.cpu_percent)
                << ' ' << r.at_ns << '\n';
        }
        if (r.rss_bytes) {
            out << "rss_bytes,node=" << label << " value=" << *r.rss_bytes << ' ' << r.at_ns
                << '\n';
        }
    }
    return out.str();
}

bool post_metrics(const std::string& url, const std::string& body) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return false;
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(5, 0);
    client.set_tcp_nodelay(true);
    const auto res = client.Post(path, body, "text/plain");
    return res && res->status / 100 == 2;
}

}  // namespace hammer
