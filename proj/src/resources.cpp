#include "hammer/resources.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>
#include <vector>

namespace hammer {

namespace {

/// First "cpu " line of /proc/stat as (busy, total) jiffies.
bool read_cpu_times(const std::string& path, uint64_t& busy, uint64_t& total) {
    std::ifstream in(path);
    std::string label;
    if (!(in >> label) || label != "cpu") return false;
    std::vector<uint64_t> fields;
    uint64_t v;
    while (in >> v && fields.size() < 10) fields.push_back(v);
    if (fields.size() < 4) return false;
    total = 0;
    for (uint64_t f : fields) total += f;
    const uint64_t idle = fields[3] + (fields.size() > 4 ? fields[4] : 0);  // idle + iowait
    busy = total - idle;
    return true;
}

std::optional<uint64_t> read_rss_bytes(const std::string& path) {
    std::ifstream in(path);
    uint64_t size_pages, resident_pages;
    if (!(in >> size_pages >> resident_pages)) return std::nullopt;
    const long page = sysconf(_SC_PAGESIZE);
    if (page <= 0) return std::nullopt;
    return resident_pages * static_cast<uint64_t>(page);
}

bool read_net_totals(const std::string& path, uint64_t& rx, uint64_t& tx) {
    std::ifstream in(path);
    if (!in) return false;
    std::string line;
    std::getline(in, line);  // two header lines
    std::getline(in, line);
    bool any = false;
    rx = tx = 0;
    while (std::getline(in, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string name = line.substr(0, colon);
        name.erase(0, name.find_first_not_of(' '));
        if (name == "lo") continue;
        std::istringstream fields(line.substr(colon + 1));
        // rx: bytes packets errs drop fifo frame compressed multicast, then tx
        uint64_t cols[16];
        int n = 0;
        while (n < 16 && (fields >> cols[n])) ++n;
        if (n < 9) continue;
        rx += cols[0];
        tx += cols[8];
        any = true;
    }
    return any;
}

}  // namespace

ResourceSampler::ResourceSampler(std::string proc_root) : proc_root_(std::move(proc_root)) {}

ResourceSample ResourceSampler::sample(int64_t at_ns) {
    ResourceSample out;
    out.at_ns = at_ns;

    uint64_t busy = 0, total = 0;
    if (read_cpu_times(proc_root_ + "/stat", busy, total)) {
        if (have_prev_ && total > prev_total_) {
            const double dt = static_cast<double>(total - prev_total_);
            const double db = static_cast<double>(busy - prev_busy_);
            out.cpu_percent = 100.0 * db / dt;
        }
        prev_busy_ = busy;
        prev_total_ = total;
        have_prev_ = true;
    }

    out.rss_bytes = read_rss_bytes(proc_root_ + "/self/statm");

    uint64_t rx = 0, tx = 0;
    if (read_net_totals(proc_root_ + "/net/dev", rx, tx)) {
        out.net_rx_bytes = rx;
        out.net_tx_bytes = tx;
    }
    return out;
}

}  // namespace hammer
