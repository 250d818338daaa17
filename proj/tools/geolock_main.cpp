#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "geolock/analysis.hpp"
#include "geolock/cryptocore.hpp"
#include "geolock/netdemo.hpp"
#include "geolock/scenario.hpp"
#include "geolock/simchannel.hpp"

namespace {

using namespace geolock;

// Exit codes: 0 success, 2 config error, 3 wrong key / off region,
// 4 timeout / incomplete key, 5 I/O.
constexpr int kExitConfig = 2;
constexpr int kExitWrongKey = 3;
constexpr int kExitTimeout = 4;
constexpr int kExitIo = 5;

Point3 parse_triplet(const std::string& text, const std::string& what) {
    Point3 p;
    char extra;
    std::istringstream in(text);
    char c1, c2;
    if (!(in >> p.x >> c1 >> p.y >> c2 >> p.z) || c1 != ',' || c2 != ',' || (in >> extra))
        throw ConfigError(what + ": expected x,y,z, got '" + text + "'");
    if (!is_finite(p)) throw ConfigError(what + ": coordinates must be finite");
    return p;
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos)
        throw ConfigError("endpoint: expected host:port, got '" + text + "'");
    int port = std::stoi(text.substr(colon + 1));
    if (port < 0 || port > 0xFFFF) throw ConfigError("endpoint: port out of range");
    return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

void cmd_info() {
    CadenceConfig cfg;
    std::cout << "K_f (ticks per second):  " << kTicksPerSecond << "\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "tick duration:           %.3f ps\n",
                  1e12 / static_cast<double>(kTicksPerSecond));
    std::cout << buf;
    std::cout << "start offset (5 ms):     " << cfg.start_offset_ticks.value << " ticks\n";
    std::cout << "between offset (2.5 ms): " << cfg.between_offset_ticks.value << " ticks\n";
    std::cout << "time window (100 ms):    " << cfg.window_ticks.value << " ticks\n";
    std::cout << "key packets per window:  33 (32 key bytes + reference)\n";
    std::cout << "slot values per byte:    256 (0x00-0xFF)\n";
}

void cmd_keyschedule(const std::string& scenario_path) {
    Scenario scenario = load_scenario(scenario_path);
    KeySchedule schedule = build_schedule(scenario);
    std::cout << "seq  anchor  tx_ticks            arrival_ticks       slot\n";
    char buf[160];
    for (std::size_t n = 0; n < schedule.entries.size(); ++n) {
        const auto& e = schedule.entries[n];
        if (n == 0)
            std::snprintf(buf, sizeof(buf), "%3zu  %-6s  %-18llu  %-18llu  -\n", n,
                          e.anchor.id.c_str(), static_cast<unsigned long long>(e.tx_time.value),
                          static_cast<unsigned long long>(e.intended_arrival.value));
        else
            std::snprintf(buf, sizeof(buf), "%3zu  %-6s  %-18llu  %-18llu  %3u\n", n,
                          e.anchor.id.c_str(), static_cast<unsigned long long>(e.tx_time.value),
                          static_cast<unsigned long long>(e.intended_arrival.value), e.slot);
        std::cout << buf;
    }
    std::cout << "span " << schedule_span(schedule).value << " ticks, slot width "
              << schedule.slot_width.ticks().value << " ticks\n";
}

int cmd_simulate(const std::string& scenario_path, const std::string& report_path) {
    Scenario scenario = load_scenario(scenario_path);
    ScenarioReport report = run_scenario(scenario);
    std::cout << report.to_text();
    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::trunc);
        if (!out) throw IoError("cannot write report: " + report_path);
        out << report.to_json().dump(2) << "\n";
    }
    return report.intended_all_ok() ? 0 : kExitWrongKey;
}

int cmd_sweep(const std::string& scenario_path, const std::string& min_s, const std::string& max_s,
              const std::string& counts_s, const std::string& out_path) {
    Scenario scenario = load_scenario(scenario_path);
    GridSpec grid;
    grid.min = parse_triplet(min_s, "--min");
    grid.max = parse_triplet(max_s, "--max");
    Point3 counts = parse_triplet(counts_s, "--counts");
    grid.counts = {static_cast<int>(counts.x), static_cast<int>(counts.y),
                   static_cast<int>(counts.z)};
    auto rows = spatial_sweep(scenario, grid);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw IoError("cannot write CSV: " + out_path);
    write_sweep_csv(out, rows);
    std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
    return 0;
}

int cmd_analyze(const std::string& scenario_path, const std::vector<std::string>& dir_args,
                const std::string& point_s, const std::string& csv_path) {
    Scenario scenario = load_scenario(scenario_path);
    std::vector<Point3> directions;
    for (const auto& d : dir_args) directions.push_back(parse_triplet(d, "--direction"));
    if (directions.empty())
        directions = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    ToleranceReport report = tolerance_report(scenario, directions);
    std::cout << report.to_text();
    if (!point_s.empty())
        std::cout << reference_delta_table(scenario, parse_triplet(point_s, "--point"));
    if (!csv_path.empty()) {
        std::ofstream out(csv_path, std::ios::trunc);
        if (!out) throw IoError("cannot write CSV: " + csv_path);
        out << report.to_csv();
    }
    return 0;
}

void cmd_encrypt(const std::string& password, const std::string& in_path,
                 const std::string& out_path) {
    auto plain = read_file(in_path);
    Key256 key = derive_key(password);
    CipherPayload payload = encrypt(plain, key, synthetic_iv(key, plain));
    auto bytes = serialize(payload);
    write_file(out_path, bytes);
}

void cmd_decrypt(const std::string& password, const std::string& in_path,
                 const std::string& out_path) {
    auto bytes = read_file(in_path);
    CipherPayload payload = deserialize_payload(bytes);
    auto plain = decrypt(payload, derive_key(password));
    write_file(out_path, plain);
}

int cmd_serve(const std::string& scenario_path, const std::string& listen, int max_sessions) {
    Scenario scenario = load_scenario(scenario_path);
    if (!scenario.payload_path) throw ConfigError("payload_path: required by serve");
    auto payload = read_file(*scenario.payload_path);
    auto [host, port] = parse_endpoint(listen);
    Server server(std::move(scenario), std::move(payload), host, port);
    std::cout << "listening on " << host << ":" << server.port() << std::endl;
    server.run(max_sessions);
    return 0;
}

int cmd_client(const std::string& connect, const std::string& position_s,
               const std::string& out_path, std::int64_t slot_width_ticks, int timeout_ms) {
    auto [host, port] = parse_endpoint(connect);
    Point3 position = parse_triplet(position_s, "--position");
    ClientResult result =
        run_client(host, port, position, SlotWidth{TickDelta{slot_width_ticks}}, timeout_ms);
    switch (result.status) {
        case ClientStatus::ok:
            if (!out_path.empty()) write_file(out_path, result.plaintext);
            std::cout << "decrypted " << result.plaintext.size() << " bytes";
            if (!out_path.empty()) std::cout << " to " << out_path;
            std::cout << "\n";
            return 0;
        case ClientStatus::off_region:
        case ClientStatus::wrong_key:
            std::cerr << "error: " << result.detail << "\n";
            return kExitWrongKey;
        case ClientStatus::incomplete_key:
            std::cerr << "error: " << result.detail << "\n";
            return kExitTimeout;
        case ClientStatus::io_error:
            std::cerr << "error: " << result.detail << "\n";
            return kExitIo;
    }
    return kExitIo;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geolock: location-dependent key distribution over packet timing"};
    app.require_subcommand(1);

    app.add_subcommand("info", "print timebase constants");

    auto* sc_keyschedule = app.add_subcommand("keyschedule", "dump the 33-packet key schedule");
    std::string scenario_path;
    sc_keyschedule->add_option("scenario", scenario_path, "scenario JSON file")->required();

    auto* sc_simulate = app.add_subcommand("simulate", "run a scenario and report per receiver");
    std::string sim_scenario, sim_report;
    sc_simulate->add_option("scenario", sim_scenario, "scenario JSON file")->required();
    sc_simulate->add_option("--report", sim_report, "write the JSON report here");

    auto* sc_sweep = app.add_subcommand("sweep", "grid sweep of decode success (CSV)");
    std::string sweep_scenario, sweep_min, sweep_max, sweep_counts, sweep_out;
    sc_sweep->add_option("scenario", sweep_scenario, "scenario JSON file")->required();
    sc_sweep->add_option("--min", sweep_min, "grid minimum corner x,y,z")->required();
    sc_sweep->add_option("--max", sweep_max, "grid maximum corner x,y,z")->required();
    sc_sweep->add_option("--counts", sweep_counts, "grid point counts nx,ny,nz")->required();
    sc_sweep->add_option("--out", sweep_out, "output CSV path")->required();

    auto* sc_analyze = app.add_subcommand("analyze", "tolerance radii and flip displacements");
    std::string an_scenario, an_point, an_csv;
    std::vector<std::string> an_dirs;
    sc_analyze->add_option("scenario", an_scenario, "scenario JSON file")->required();
    sc_analyze->add_option("--direction", an_dirs, "probe direction x,y,z (repeatable)");
    sc_analyze->add_option("--point", an_point, "also print per-gap reference deltas at x,y,z");
    sc_analyze->add_option("--csv", an_csv, "write probe results as CSV");

    auto* sc_encrypt = app.add_subcommand("encrypt", "encrypt a file (GLK1 container)");
    std::string enc_password, enc_in, enc_out;
    sc_encrypt->add_option("-p,--password", enc_password, "password")->required();
    sc_encrypt->add_option("input", enc_in, "plaintext file")->required();
    sc_encrypt->add_option("output", enc_out, "ciphertext file")->required();

    auto* sc_decrypt = app.add_subcommand("decrypt", "decrypt a GLK1 container");
    std::string dec_password, dec_in, dec_out;
    sc_decrypt->add_option("-p,--password", dec_password, "password")->required();
    sc_decrypt->add_option("input", dec_in, "ciphertext file")->required();
    sc_decrypt->add_option("output", dec_out, "plaintext file")->required();

    auto* sc_serve = app.add_subcommand("serve", "serve the scenario payload over TCP");
    std::string srv_scenario, srv_listen = "127.0.0.1:47810";
    int srv_max_sessions = 0;
    sc_serve->add_option("scenario", srv_scenario, "scenario JSON file")->required();
    sc_serve->add_option("--listen", srv_listen, "listen endpoint host:port (port 0 = ephemeral)");
    sc_serve->add_option("--max-sessions", srv_max_sessions, "stop after N sessions (0 = run on)");

    auto* sc_client = app.add_subcommand("client", "receive, rebuild the key, decrypt");
    std::string cl_connect, cl_position, cl_out;
    std::int64_t cl_slot_width = kDefaultSlotWidthTicks.value;
    int cl_timeout = 2000;
    sc_client->add_option("--connect", cl_connect, "server endpoint host:port")->required();
    sc_client->add_option("--position", cl_position, "claimed receiver position x,y,z")->required();
    sc_client->add_option("--out", cl_out, "write decrypted payload here");
    sc_client->add_option("--slot-width-ticks", cl_slot_width, "receiver slot width (default 426)");
    sc_client->add_option("--timeout-ms", cl_timeout, "quiet timeout in ms (default 2000)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (app.got_subcommand("info")) {
            cmd_info();
            return 0;
        }
        if (app.got_subcommand("keyschedule")) {
            cmd_keyschedule(scenario_path);
            return 0;
        }
        if (app.got_subcommand("simulate")) return cmd_simulate(sim_scenario, sim_report);
        if (app.got_subcommand("sweep"))
            return cmd_sweep(sweep_scenario, sweep_min, sweep_max, sweep_counts, sweep_out);
        if (app.got_subcommand("analyze")) return cmd_analyze(an_scenario, an_dirs, an_point, an_csv);
        if (app.got_subcommand("encrypt")) {
            cmd_encrypt(enc_password, enc_in, enc_out);
            return 0;
        }
        if (app.got_subcommand("decrypt")) {
            cmd_decrypt(dec_password, dec_in, dec_out);
            return 0;
        }
        if (app.got_subcommand("serve")) return cmd_serve(srv_scenario, srv_listen, srv_max_sessions);
        if (app.got_subcommand("client"))
            return cmd_client(cl_connect, cl_position, cl_out, cl_slot_width, cl_timeout);
    } catch (const ConfigError& e) {
        std::cerr << "config error:\n" << e.what() << "\n";
        return kExitConfig;
    } catch (const ResourceError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const RangeError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CryptoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitWrongKey;
    } catch (const SlotRangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitWrongKey;
    } catch (const IncompleteTraceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTimeout;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const FramingError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
