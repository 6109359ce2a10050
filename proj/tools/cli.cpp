#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnctl/control.hpp"
#include "bnctl/diagram.hpp"
#include "bnctl/dynamics.hpp"
#include "bnctl/model.hpp"

namespace bnctl::cli {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

json count_json(const bdd::BigCount& c) {
    if (c <= std::numeric_limits<std::uint64_t>::max()) return static_cast<std::uint64_t>(c);
    return c.str();
}

std::string format_seconds(double s) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << s;
    return out.str();
}

std::vector<VarIndex> parse_order(const BooleanNetwork& net, const std::string& spec) {
    std::vector<VarIndex> order;
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        std::string name = b == std::string::npos ? "" : item.substr(b, e - b + 1);
        try {
            order.push_back(net.index_of(name));
        } catch (const std::out_of_range&) {
            throw UsageError("--order names unknown variable '" + name + "'");
        }
    }
    std::vector<VarIndex> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    bool permutation = sorted.size() == net.size();
    for (std::size_t i = 0; permutation && i < sorted.size(); ++i) permutation = sorted[i] == i;
    if (!permutation) throw UsageError("--order must be a permutation of all variables");
    return order;
}

// One model loaded, encoded and with its attractors detected.
struct Session {
    std::string path;
    BooleanNetwork network;
    std::unique_ptr<bdd::Manager> manager;
    std::unique_ptr<dynamics::TransitionModel> model;
    std::vector<dynamics::Attractor> attractors;
    double detect_seconds = 0;

    Session(std::string model_path, BooleanNetwork net) : path(std::move(model_path)), network(std::move(net)) {}
};

std::unique_ptr<Session> open_session(const std::string& path, const std::string& order_spec, std::uint64_t seed) {
    if (!fs::is_regular_file(path)) throw UsageError("cannot read model file: " + path);
    auto session = std::make_unique<Session>(path, load_network(path));
    const BooleanNetwork& net = session->network;
    if (order_spec.empty()) session->manager = std::make_unique<bdd::Manager>(net.size());
    else session->manager = std::make_unique<bdd::Manager>(net.size(), parse_order(net, order_spec));
    auto start = Clock::now();
    session->model = std::make_unique<dynamics::TransitionModel>(net, *session->manager);
    session->attractors = dynamics::attractors(*session->model, seed);
    session->detect_seconds = seconds_since(start);
    return session;
}

const char* kind_name(dynamics::AttractorKind kind) {
    return kind == dynamics::AttractorKind::Singleton ? "singleton" : "cyclic";
}

constexpr std::size_t kListedCyclicStates = 256;
constexpr std::size_t kListedBasinVars = 12;

json attractor_json(Session& s, std::size_t id) {
    const auto& a = s.attractors[id];
    json j = {{"id", id}, {"type", kind_name(a.kind)}, {"size", count_json(a.size)}};
    if (a.size <= kListedCyclicStates) {
        json states = json::array();
        for (const State& st : s.manager->states(a.states)) states.push_back(st.to_string());
        j["states"] = std::move(states);
    }
    return j;
}

json report_json(Session& s) {
    json attractors = json::array();
    for (std::size_t id = 0; id < s.attractors.size(); ++id) attractors.push_back(attractor_json(s, id));
    return {{"model", s.path},
            {"n", s.network.size()},
            {"edges", s.network.edge_count()},
            {"attractors", std::move(attractors)},
            {"controls", json::array()}};
}

std::string attractor_label(Session& s, std::size_t id) {
    const auto& a = s.attractors[id];
    if (a.kind == dynamics::AttractorKind::Singleton) return a.min_state.to_string();
    std::ostringstream out;
    out << "cyclic size=" << a.size << " representative=" << a.min_state.to_string();
    return out.str();
}

std::vector<std::size_t> select_targets(Session& s, const std::optional<long long>& target) {
    std::vector<std::size_t> ids;
    if (!target) {
        for (std::size_t i = 0; i < s.attractors.size(); ++i) ids.push_back(i);
        return ids;
    }
    if (*target < 0 || static_cast<std::size_t>(*target) >= s.attractors.size())
        throw UsageError("unknown target id " + std::to_string(*target) + " (model has " +
                         std::to_string(s.attractors.size()) + " attractors)");
    ids.push_back(static_cast<std::size_t>(*target));
    return ids;
}

std::string control_text(const BooleanNetwork& net, const Control& c) {
    std::string out = "{";
    bool first = true;
    for (const Literal& lit : c.literals()) {
        if (!first) out += ", ";
        first = false;
        out += net.name(lit.index) + ":=" + (lit.value ? "1" : "0");
    }
    return out + "}";
}

json names_json(const BooleanNetwork& net, const std::vector<VarIndex>& indices) {
    json out = json::array();
    for (VarIndex i : indices) out.push_back(net.name(i));
    return out;
}

struct ControlFlags {
    std::optional<long long> target;
    std::string mode = "temporary";
    std::optional<long long> max_size;
    bool all = false;
    bool timings = false;
    bool json_out = false;
};

struct ControlRun {
    std::size_t target;
    control::ControlResult result;
    double seconds;
};

ControlRun run_control(Session& s, std::size_t target, const ControlFlags& flags) {
    auto start = Clock::now();
    control::ControlResult result;
    const auto& a = s.attractors[target];
    if (flags.mode == "instantaneous") {
        result = control::instantaneous_target_control(*s.model, a.states);
    } else {
        control::SearchOptions options;
        if (flags.max_size) options.max_size = static_cast<std::size_t>(*flags.max_size);
        options.all_results = flags.all;
        result = control::temporary_target_control(*s.model, a.states, options);
    }
    return {target, std::move(result), seconds_since(start)};
}

// ---------------------------------------------------------------------------
// Commands

int cmd_attractors(const std::string& path, const std::string& order, std::uint64_t seed, bool json_out,
                   std::ostream& out) {
    auto s = open_session(path, order, seed);
    if (json_out) {
        out << report_json(*s).dump() << "\n";
        return kOk;
    }
    std::size_t singletons = 0;
    for (const auto& a : s->attractors) singletons += a.kind == dynamics::AttractorKind::Singleton;
    out << "model: " << path << "\n";
    out << "variables: " << s->network.size() << "  edges: " << s->network.edge_count() << "\n";
    out << "attractors: " << s->attractors.size() << " (" << singletons << " singleton, "
        << s->attractors.size() - singletons << " cyclic)\n";
    for (std::size_t id = 0; id < s->attractors.size(); ++id) {
        const auto& a = s->attractors[id];
        out << "  [" << id << "] ";
        if (a.kind == dynamics::AttractorKind::Singleton) out << "singleton " << a.min_state.to_string() << "\n";
        else out << "cyclic size=" << a.size << " representative=" << a.min_state.to_string() << "\n";
    }
    return kOk;
}

int cmd_basins(const std::string& path, const std::string& order, std::uint64_t seed,
               const std::optional<long long>& target, bool json_out, std::ostream& out) {
    auto s = open_session(path, order, seed);
    auto ids = select_targets(*s, target);
    const bool list_states = s->network.size() <= kListedBasinVars;
    json report = report_json(*s);
    json basins = json::array();
    for (std::size_t id : ids) {
        const auto& a = s->attractors[id];
        bdd::StateSet wb = dynamics::weak_basin(*s->model, a.states);
        bdd::StateSet sb = dynamics::strong_basin(*s->model, a.states);
        auto weak_count = s->manager->count_states(wb);
        auto strong_count = s->manager->count_states(sb);
        if (json_out) {
            json b = {{"target", id}, {"weak", count_json(weak_count)}, {"strong", count_json(strong_count)}};
            if (list_states) {
                json w = json::array(), st = json::array();
                for (const State& x : s->manager->states(wb)) w.push_back(x.to_string());
                for (const State& x : s->manager->states(sb)) st.push_back(x.to_string());
                b["weak_states"] = std::move(w);
                b["strong_states"] = std::move(st);
            }
            basins.push_back(std::move(b));
            continue;
        }
        out << "target [" << id << "] " << attractor_label(*s, id) << "\n";
        out << "  |WB| = " << weak_count << "\n";
        out << "  |SB| = " << strong_count << "\n";
        if (list_states) {
            out << "  WB:";
            for (const State& x : s->manager->states(wb)) out << " " << x.to_string();
            out << "\n  SB:";
            for (const State& x : s->manager->states(sb)) out << " " << x.to_string();
            out << "\n";
        }
    }
    if (json_out) {
        report["basins"] = std::move(basins);
        out << report.dump() << "\n";
    }
    return kOk;
}

int cmd_control(const std::string& path, const std::string& order, std::uint64_t seed, const ControlFlags& flags,
                std::ostream& out) {
    if (flags.mode != "temporary" && flags.mode != "instantaneous")
        throw UsageError("--mode must be temporary or instantaneous");
    if (flags.max_size && *flags.max_size < 0) throw UsageError("--max-size must be nonnegative");
    auto s = open_session(path, order, seed);
    auto ids = select_targets(*s, flags.target);
    const BooleanNetwork& net = s->network;

    json report = report_json(*s);
    for (std::size_t id : ids) {
        ControlRun run = run_control(*s, id, flags);
        const auto& r = run.result;
        if (flags.json_out) {
            json sets = json::array();
            for (const auto& fc : r.controls) {
                sets.push_back({{"zero", names_json(net, fc.control.zero_set())},
                                {"one", names_json(net, fc.control.one_set())},
                                {"size", fc.control.size()},
                                {"schema", fc.schema_index},
                                {"pattern", r.schemata[fc.schema_index].to_string()},
                                {"instantaneous_sufficient", fc.instantaneous_sufficient}});
            }
            report["controls"].push_back({{"target", id},
                                          {"mode", flags.mode},
                                          {"zeta", r.zeta},
                                          {"sets", std::move(sets)},
                                          {"seconds", flags.timings ? json(run.seconds) : json(nullptr)}});
            continue;
        }
        out << "target [" << id << "] " << attractor_label(*s, id) << "  mode " << flags.mode << "  zeta "
            << r.zeta << "\n";
        out << "  schemata: " << r.schemata.size() << "  skipped: " << r.skipped.size()
            << "  verifications: " << r.verifications << "\n";
        if (r.controls.empty()) out << "  no control found\n";
        for (const auto& fc : r.controls) {
            out << "  " << control_text(net, fc.control) << "  size " << fc.control.size() << "  schema "
                << fc.schema_index << " (" << r.schemata[fc.schema_index].to_string() << ")";
            if (r.mode == control::Mode::Temporary && fc.instantaneous_sufficient) out << "  instantaneous-sufficient";
            out << "\n";
        }
        if (flags.timings) out << "  seconds " << format_seconds(run.seconds) << "\n";
    }
    if (flags.json_out) out << report.dump() << "\n";
    return kOk;
}

// Bench rows are computed in a child process so a model that exceeds the
// timeout can be killed without disturbing the rest of the table.
struct BenchRow {
    std::string name;
    std::optional<std::size_t> n, edges;
    json result;  // null on timeout
    std::string error;
};

json bench_model(const std::string& path, const ControlFlags& flags) {
    auto s = open_session(path, "", 0);
    std::size_t singletons = 0;
    for (const auto& a : s->attractors) singletons += a.kind == dynamics::AttractorKind::Singleton;
    json per = json::array();
    double total = 0;
    for (std::size_t id = 0; id < s->attractors.size(); ++id) {
        ControlRun run = run_control(*s, id, flags);
        total += run.seconds;
        auto min_size = run.result.min_size();
        per.push_back({{"target", id},
                       {"seconds", run.seconds},
                       {"sets", run.result.controls.size()},
                       {"min_size", min_size ? json(*min_size) : json(nullptr)}});
    }
    return {{"singleton", singletons},
            {"cyclic", s->attractors.size() - singletons},
            {"detect_seconds", s->detect_seconds},
            {"control_seconds", total},
            {"per_attractor", std::move(per)}};
}

json bench_in_child(const std::string& path, const ControlFlags& flags, double timeout, std::string& error) {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
    std::cout.flush();
    std::cerr.flush();
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        close(fds[0]);
        std::string payload;
        int code = 0;
        try {
            payload = bench_model(path, flags).dump();
        } catch (const std::exception& e) {
            payload = json{{"error", e.what()}}.dump();
            code = 1;
        }
        const char* p = payload.data();
        std::size_t left = payload.size();
        while (left > 0) {
            ssize_t w = write(fds[1], p, left);
            if (w <= 0) break;
            p += w;
            left -= static_cast<std::size_t>(w);
        }
        close(fds[1]);
        _exit(code);
    }
    close(fds[1]);
    std::string payload;
    auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout));
    bool timed_out = false;
    char buffer[4096];
    for (;;) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        if (left <= 0) {
            timed_out = true;
            break;
        }
        pollfd pfd{fds[0], POLLIN, 0};
        int ready = poll(&pfd, 1, static_cast<int>(std::min<long long>(left, 1000)));
        if (ready == 0) continue;
        if (ready < 0) {
            if (errno == EINTR) continue;
            break;
        }
        ssize_t r = read(fds[0], buffer, sizeof buffer);
        if (r <= 0) break;
        payload.append(buffer, static_cast<std::size_t>(r));
    }
    close(fds[0]);
    if (timed_out) kill(pid, SIGKILL);
    int status = 0;
    waitpid(pid, &status, 0);
    if (timed_out) return nullptr;
    json parsed = json::parse(payload, nullptr, false);
    if (parsed.is_discarded()) {
        error = "analysis crashed";
        return nullptr;
    }
    if (parsed.contains("error")) {
        error = parsed["error"].get<std::string>();
        return nullptr;
    }
    return parsed;
}

int cmd_bench(const std::string& dir, const ControlFlags& flags, double timeout, std::ostream& out) {
    if (flags.mode != "temporary" && flags.mode != "instantaneous")
        throw UsageError("--mode must be temporary or instantaneous");
    if (timeout <= 0) throw UsageError("--timeout must be positive");
    if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".bnet") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<BenchRow> rows;
    for (const auto& file : files) {
        BenchRow row;
        row.name = file.stem().string();
        try {
            BooleanNetwork net = load_network(file.string());
            row.n = net.size();
            row.edges = net.edge_count();
        } catch (const std::exception& e) {
            row.error = e.what();
            rows.push_back(std::move(row));
            continue;
        }
        row.result = bench_in_child(file.string(), flags, timeout, row.error);
        rows.push_back(std::move(row));
    }

    if (flags.json_out) {
        json table = json::array();
        for (const auto& row : rows) {
            json j = {{"model", row.name}};
            if (row.n) j["n"] = *row.n;
            if (row.edges) j["edges"] = *row.edges;
            if (!row.error.empty()) j["error"] = row.error;
            else if (row.result.is_null()) j["timeout"] = true;
            else j.update(row.result);
            table.push_back(std::move(j));
        }
        out << json{{"mode", flags.mode}, {"rows", std::move(table)}}.dump() << "\n";
        return kOk;
    }

    out << "model, nodes, edges, singleton, cyclic, detect_s, control_s, per_attractor_s\n";
    for (const auto& row : rows) {
        out << row.name << ", ";
        if (!row.error.empty() && !row.n) {
            out << "error: " << row.error << "\n";
            continue;
        }
        out << *row.n << ", " << *row.edges << ", ";
        if (!row.error.empty()) {
            out << "error: " << row.error << "\n";
        } else if (row.result.is_null()) {
            out << "-, -, -, -, -\n";
        } else {
            const json& r = row.result;
            out << r["singleton"].get<std::size_t>() << ", " << r["cyclic"].get<std::size_t>() << ", "
                << format_seconds(r["detect_seconds"].get<double>()) << ", "
                << format_seconds(r["control_seconds"].get<double>()) << ", ";
            bool first = true;
            for (const auto& p : r["per_attractor"]) {
                if (!first) out << ";";
                first = false;
                out << format_seconds(p["seconds"].get<double>());
            }
            out << "\n";
        }
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Target control of asynchronous Boolean networks"};
    app.require_subcommand(1);

    std::string model, order, dir;
    std::uint64_t seed = 0;
    bool json_out = false;
    ControlFlags flags;
    double timeout = 5 * 3600.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("model", model, "model file")->required();
        sub->add_option("--order", order, "comma-separated variable order for the decision diagrams");
        sub->add_option("--seed", seed, "seed for attractor descent");
        sub->add_flag("--json", json_out, "machine-readable output");
    };

    auto* attractors = app.add_subcommand("attractors", "list attractors");
    add_common(attractors);

    auto* basins = app.add_subcommand("basins", "weak and strong basin sizes");
    add_common(basins);
    basins->add_option("--target", flags.target, "attractor id");

    auto* control = app.add_subcommand("control", "compute target controls");
    add_common(control);
    control->add_option("--target", flags.target, "attractor id (default: all)");
    control->add_option("--mode", flags.mode, "temporary | instantaneous");
    control->add_option("--max-size", flags.max_size, "initial bound on control size");
    control->add_flag("--all", flags.all, "keep every valid control of the first successful size per schema");
    control->add_flag("--timings", flags.timings, "report wall-clock seconds");

    auto* bench = app.add_subcommand("bench", "time attractor detection and control over a directory of models");
    bench->add_option("directory", dir, "directory of .bnet files")->required();
    bench->add_option("--mode", flags.mode, "temporary | instantaneous");
    bench->add_option("--timeout", timeout, "per-model timeout in seconds");
    bench->add_option("--max-size", flags.max_size, "initial bound on control size");
    bench->add_flag("--json", json_out, "machine-readable output");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kBadArguments;
    }
    flags.json_out = json_out;

    try {
        if (*attractors) return cmd_attractors(model, order, seed, json_out, out);
        if (*basins) return cmd_basins(model, order, seed, flags.target, json_out, out);
        if (*control) return cmd_control(model, order, seed, flags, out);
        if (*bench) return cmd_bench(dir, flags, timeout, out);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kParseError;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kBadArguments;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}

}  // namespace bnctl::cli
