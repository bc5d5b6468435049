#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hammer/clock.hpp"
#include "hammer/loadgen.hpp"
#include "hammer/metrics.hpp"
#include "hammer/plan.hpp"
#include "hammer/report.hpp"
#include "hammer/simnode.hpp"

namespace {

volatile std::sig_atomic_t g_signalled = 0;

void on_signal(int) { g_signalled = 1; }

void install_signal_handlers() {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
}

bool read_file(const std::string& path, std::string& out, std::string& error) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        error = "cannot open " + path;
        return false;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string default_out_dir() {
    const char* env = std::getenv("HAMMER_OUT_DIR");
    return env && *env ? env : "./results";
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& metrics_url) {
    std::string document, error;
    if (!read_file(config_path, document, error)) {
        std::cerr << error << "\n";
        return 1;
    }
    hammer::TestPlan plan;
    try {
        plan = hammer::load_plan(document);
    } catch (const hammer::PlanError& e) {
        std::cerr << config_path << ": " << e.what() << "\n";
        return 1;
    }

    hammer::RealClock clock;
    const auto result = hammer::run_plan(plan, clock);

    const auto paths = hammer::prepare_run_dir(out_dir, result.summary.started_at_unix);
    const std::string text = hammer::render_summary(result.summary);
    write_file(paths.log, text);
    write_file(paths.summary_json, hammer::export_json(result.summary));
    write_file(paths.records_csv, hammer::export_csv(result.profiles));
    const std::string lines = hammer::export_line_protocol(
        result.tps_samples, result.summary.resources, plan.nodes[0].name);
    write_file(paths.line_protocol, lines);

    std::cout << text;
    std::cout << "results written to " << paths.dir.string() << "\n";

    if (!metrics_url.empty()) {
        if (!hammer::post_metrics(metrics_url, lines)) {
            std::cout << "warning: metrics POST to " << metrics_url << " failed\n";
        }
    }

    if (result.aborted) {
        std::cerr << "run aborted: " << result.abort_reason << "\n";
        return 2;
    }
    return 0;
}

int cmd_mock(const std::string& config_path, const std::string& listen) {
    std::string document, error;
    if (!read_file(config_path, document, error)) {
        std::cerr << error << "\n";
        return 1;
    }
    hammer::sim::ChainConfig config;
    try {
        config = hammer::sim::load_chain_config(document);
    } catch (const hammer::PlanError& e) {
        std::cerr << config_path << ": " << e.what() << "\n";
        return 1;
    }

    if (config.clock == hammer::sim::ClockMode::virtual_time) {
        // The virtual clock only advances when every registered participant
        // sleeps on it; clients in other processes cannot participate, so a
        // standalone mock would spin time forward unboundedly.
        std::cerr << config_path
                  << ": clock \"virtual\" is for in-process harnesses; the standalone "
                     "mock needs \"real\"\n";
        return 1;
    }

    const auto colon = listen.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == listen.size()) {
        std::cerr << "--listen expects host:port, got \"" << listen << "\"\n";
        return 1;
    }
    const std::string host = listen.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception&) {
        port = -1;
    }
    if (port <= 0 || port > 65535) {
        std::cerr << "--listen port must be in 1..65535\n";
        return 1;
    }

    hammer::RealClock clock;
    install_signal_handlers();
    try {
        hammer::sim::Cluster cluster(config, clock, host, port);
        for (const auto& url : cluster.endpoint_urls()) std::cout << url << "\n";
        std::cout << "serving; interrupt to stop" << std::endl;
        while (!g_signalled) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        cluster.stop();
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}

int cmd_monitor(const std::string& endpoint, int64_t from_block, const std::string& label) {
    hammer::JsonRpcClient client(endpoint);
    hammer::RealClock clock;

    std::optional<hammer::Block> anchor;
    try {
        uint64_t anchor_height;
        if (from_block >= 0) {
            anchor_height = from_block > 0 ? static_cast<uint64_t>(from_block) - 1 : 0;
        } else {
            anchor_height = hammer::fetch_block_number(client);
        }
        anchor = hammer::fetch_block(client, anchor_height);
    } catch (const std::exception& e) {
        std::cerr << endpoint << ": " << e.what() << "\n";
        return 2;
    }
    if (!anchor) {
        std::cerr << endpoint << ": anchor block not available\n";
        return 2;
    }

    install_signal_handlers();
    hammer::Block prev = *anchor;
    const auto result = hammer::watch_blocks(
        client, clock, anchor->number + 1,
        [&](const hammer::Block& block) {
            try {
                const auto sample = hammer::block_tps(prev, block);
                std::cout << hammer::export_line_protocol({&sample, 1}, {}, label);
                std::cout.flush();
            } catch (const std::invalid_argument&) {
                // non-monotonic timestamps upstream: skip the sample
            }
            prev = block;
        },
        [] { return g_signalled != 0; });

    if (result.failed) {
        std::cerr << "monitor stopped: " << result.error << "\n";
        return 2;
    }
    return 0;
}

int cmd_report(const std::string& input_path, const std::string& format) {
    std::string document, error;
    if (!read_file(input_path, document, error)) {
        std::cerr << error << "\n";
        return 1;
    }
    hammer::RunSummary summary;
    try {
        summary = hammer::import_json(document);
    } catch (const hammer::ReportParseError& e) {
        std::cerr << input_path << ": " << e.what() << "\n";
        return 1;
    }

    if (format == "text") {
        std::cout << hammer::render_summary(summary);
        return 0;
    }
    // Per-profile rows; per-transaction records live in the run's CSV file.
    std::cout << "index,produced,included,failed_timeout,rejected,wall_ms,tps\n";
    for (const auto& p : summary.profiles) {
        std::cout << p.index << ',' << p.produced << ',' << p.included << ','
                  << p.failed_timeout << ',' << p.rejected << ',' << p.wall_time.millis << ',';
        if (p.tps) std::cout << *p.tps;
        std::cout << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"config-driven load tester for Ethereum-compatible JSON-RPC endpoints"};
    app.require_subcommand(1);

    std::string run_config, run_out = default_out_dir(), run_metrics_url;
    auto* run = app.add_subcommand("run", "execute a test plan and write reports");
    run->add_option("--config", run_config, "test plan JSON file")->required();
    run->add_option("--out", run_out, "output directory (default ./results, or HAMMER_OUT_DIR)");
    run->add_option("--metrics-url", run_metrics_url, "POST line-protocol metrics to this URL");

    std::string mock_config, mock_listen;
    auto* mock = app.add_subcommand("mock", "serve a deterministic in-memory chain");
    mock->add_option("--config", mock_config, "chain config JSON file")->required();
    mock->add_option("--listen", mock_listen, "host:port; endpoints bind consecutive ports")
        ->required();

    std::string mon_endpoint, mon_label = "node0";
    int64_t mon_from = -1;
    auto* monitor = app.add_subcommand("monitor", "stream per-block TPS as line protocol");
    monitor->add_option("--endpoint", mon_endpoint, "JSON-RPC endpoint URL")->required();
    monitor->add_option("--from-block", mon_from, "first block to report (default: next sealed)");
    monitor->add_option("--label", mon_label, "node tag for exported lines");

    std::string rep_input, rep_format = "text";
    auto* report = app.add_subcommand("report", "re-render a summary.json");
    report->add_option("--input", rep_input, "summary JSON file")->required();
    report->add_option("--format", rep_format, "text or csv")
        ->check(CLI::IsMember({"text", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the error itself
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(run_config, run_out, run_metrics_url);
        if (mock->parsed()) return cmd_mock(mock_config, mock_listen);
        if (monitor->parsed()) return cmd_monitor(mon_endpoint, mon_from, mon_label);
        if (report->parsed()) return cmd_report(rep_input, rep_format);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 1;
}
