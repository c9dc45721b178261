#include "qretro/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <thread>

#include "qretro/errors.hpp"
#include "qretro/io.hpp"
#include "qretro/scan.hpp"

namespace qretro {

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string cnum(cplx z) {
    if (z.imag() == 0.0) return num(z.real());
    return fmt::format("{}{}{}i", num(z.real()), z.imag() < 0 ? "-" : "+", num(std::abs(z.imag())));
}

std::string vec(const Vec3 &v) { return fmt::format("({}, {}, {})", num(v[0]), num(v[1]), num(v[2])); }

std::string mat2(const CMat2 &m) {
    return fmt::format("[[{}, {}], [{}, {}]]", cnum(m(0, 0)), cnum(m(0, 1)), cnum(m(1, 0)), cnum(m(1, 1)));
}

void require(const std::string &path, const char *flag) {
    if (path.empty()) throw InvalidArgument(std::string("missing ") + flag);
}

ChannelRep load_channel(const RunConfig &cfg) {
    require(cfg.channel_path, "--channel");
    return channel_from_json(read_json_file(cfg.channel_path));
}

BlochState load_state(const RunConfig &cfg) {
    require(cfg.state_path, "--state");
    return state_from_json(read_json_file(cfg.state_path));
}

void emit_report(const RunConfig &cfg, const Json &report, std::ostream &out) {
    const std::string text = report.dump(2) + "\n";
    if (cfg.out_dir.empty()) {
        out << "json:\n" << text;
        return;
    }
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = std::filesystem::path(cfg.out_dir) / (command_name(cfg.command) + ".json");
    write_text_file(path.string(), text);
    out << "wrote " << path.string() << "\n";
}

void print_slacks(const FeasibilityReport &r, std::ostream &out) {
    fmt::print(out, "slacks: {} {} {} ({})\n", num(r.slack[0]), num(r.slack[1]), num(r.slack[2]),
               r.feasible ? "all non-negative" : fmt::format("inequality {} fails", r.failed_inequality().value_or(0) + 1));
}

bool is_discard_and_prepare(const ChannelRep &f, double tol) {
    const RMat4 r = f.ptm();
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 1; j < 4; ++j)
            if (std::abs(r(i, j)) > tol) return false;
    return true;
}

std::string table_text(const TwoTimeTable &t) {
    std::string s;
    for (const auto &row : t) s += fmt::format("  {:>24} {:>24} {:>24}\n", num(row[0]), num(row[1]), num(row[2]));
    return s;
}

Json table_json(const TwoTimeTable &t) {
    Json out = Json::array();
    for (const auto &row : t) out.push_back({row[0], row[1], row[2]});
    return out;
}

int scan_region(const RunConfig &cfg, std::ostream &out) {
    const int resolution = cfg.resolution == 0 ? 201 : cfg.resolution;
    const bool depolarizing = cfg.family == "depolarizing";
    const ScanGrid grid =
        ScanGrid::uniform(resolution, depolarizing ? Vec3{1.0, 0.0, 0.0} : diagonal_direction());
    const unsigned threads = effective_threads(cfg.threads);
    const auto cells = depolarizing ? scan_depolarizing(grid, cfg.tol, threads) : scan_bb84(grid, cfg.tol, threads);

    const std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
    std::filesystem::create_directories(dir);
    const std::string stem = (std::filesystem::path(dir) / fmt::format("{}_{}", cfg.family, resolution)).string();
    write_text_file(stem + ".csv", emit_csv(cells));
    write_text_file(stem + ".svg", emit_svg(cells, fmt::format("{} channel, resolution {}", cfg.family, resolution)));

    std::size_t feasible = 0;
    for (const auto &c : cells) feasible += c.feasible ? 1 : 0;
    fmt::print(out, "family: {}\nresolution: {}\ncells: {}\nfeasible: {} ({})\n", cfg.family, resolution, cells.size(),
               feasible, num(static_cast<double>(feasible) / static_cast<double>(cells.size())));
    fmt::print(out, "wrote {}.csv\nwrote {}.svg\n", stem, stem);

    if (depolarizing) {
        out << "chi table (largest |r|^2 with an inverse for every smaller radius):\n";
        for (int k = 1; k <= 19; ++k) {
            const double p = 0.05 * k;
            const ChiEstimate chi = boundary_chi(p, 1e-10, cfg.tol);
            fmt::print(out, "  p = {:.2f}  chi = {}{}\n", p, num(chi.chi),
                       chi.monotone ? "" : "  (warning: not monotone in t, grid maximum)");
        }
    }
    return exit_code::ok;
}

int scan_three(const RunConfig &cfg, std::ostream &out) {
    const int resolution = cfg.resolution == 0 ? 8 : cfg.resolution;
    const auto summary = scan_three_entry(resolution, cfg.samples, cfg.seed, cfg.tol, effective_threads(cfg.threads));

    std::string csv = "p0,p1,p2,p3,feasible_samples\n";
    for (const auto &[p, count] : summary.per_channel)
        csv += fmt::format("{},{},{},{},{}\n", num(p[0]), num(p[1]), num(p[2]), num(p[3]), count);
    const std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / fmt::format("three-entry_{}.csv", resolution)).string();
    write_text_file(path, csv);

    fmt::print(out, "family: three-entry\nresolution: {}\nchannels: {}\nbloch samples: {} (seed {})\ncells: {}\n",
               resolution, summary.channels, summary.bloch_samples, summary.seed, summary.cells);
    fmt::print(out, "maximally mixed rows feasible: {}/{}\n", summary.mixed_feasible, summary.channels);
    fmt::print(out, "confirmed hits with |r| > 1e-6: {}\nunconfirmed feasible cells: {}\n", summary.hits.size(),
               summary.unconfirmed);
    for (const auto &h : summary.hits)
        fmt::print(out, "  hit p = ({}, {}, {}, {}) r = {} residual {}\n", num(h.p[0]), num(h.p[1]), num(h.p[2]),
                   num(h.p[3]), vec(h.r), num(h.residual));
    fmt::print(out, "wrote {}\n", path);
    return exit_code::ok;
}

}  // namespace

Command parse_command(const std::string &name) {
    if (name == "invert") return Command::invert;
    if (name == "unscathed") return Command::unscathed;
    if (name == "verify") return Command::verify;
    if (name == "scan") return Command::scan;
    if (name == "kraus") return Command::kraus;
    if (name == "three-entry") return Command::three_entry;
    throw InvalidArgument("unknown command \"" + name + "\"");
}

std::string command_name(Command c) {
    switch (c) {
        case Command::invert:
            return "invert";
        case Command::unscathed:
            return "unscathed";
        case Command::verify:
            return "verify";
        case Command::scan:
            return "scan";
        case Command::kraus:
            return "kraus";
        case Command::three_entry:
            return "three-entry";
    }
    return "unknown";
}

void RunConfig::validate() const {
    if (!(tol > 0.0)) throw InvalidArgument("--tol must be positive");
    if (resolution != 0 && resolution < 2) throw InvalidArgument("--resolution must be at least 2");
    if (samples < 0) throw InvalidArgument("--samples must be non-negative");
    if (family != "depolarizing" && family != "bb84" && family != "three-entry")
        throw InvalidArgument("--family must be depolarizing, bb84 or three-entry");
}

unsigned effective_threads(unsigned requested) {
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    if (const char *env = std::getenv("QUBIT_RETRO_THREADS")) {
        char *end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

int cmd_invert(const RunConfig &cfg, std::ostream &out) {
    const ChannelRep e = load_channel(cfg);
    const BlochState s = load_state(cfg);
    fmt::print(out, "channel: {} form\nstate: r = {}, |r|^2 = {}\n", e.kind_name(), vec(s.r()), num(s.t()));

    const InversionResult result = bayesian_inverse(e, s, cfg.tol);
    if (const auto *none = std::get_if<NoInverse>(&result)) {
        fmt::print(out, "verdict: no Bayesian inverse ({})\n{}\n", to_string(none->reason), none->message);
        fmt::print(out, "reduced eigenvalues: {}\n", vec(none->lambda));
        const auto &u = none->unscathed_residuals;
        fmt::print(out, "unscathed residuals |P(rho) - s_k rho s_k|: {} {} {} {}\n", num(u[0]), num(u[1]), num(u[2]),
                   num(u[3]));
        if (none->report) print_slacks(*none->report, out);
        emit_report(cfg, to_json(*none), out);
        return exit_code::no_inverse;
    }

    const auto &rec = std::get<InverseRecord>(result);
    const ChannelRep f = rec.channel();
    fmt::print(out, "verdict: inverse found ({} route, {})\n", rec.route == InverseRoute::analytic ? "analytic" : "adjoint",
               rec.unique ? "unique" : "not unique");
    if (is_discard_and_prepare(f, 1e-12)) out << "form: discard-and-prepare (every input is replaced by the reference state)\n";
    out << "a_ij (J[F] = 1/2 sum a_ij s_i (x) s_j):\n";
    for (std::size_t i = 0; i < 4; ++i)
        fmt::print(out, "  {:>24} {:>24} {:>24} {:>24}\n", num(rec.a(i, 0)), num(rec.a(i, 1)), num(rec.a(i, 2)),
                   num(rec.a(i, 3)));
    out << "Kraus operators:\n";
    for (std::size_t k = 0; k < rec.kraus.size(); ++k) fmt::print(out, "  K{} = {}\n", k, mat2(rec.kraus[k]));
    print_slacks(rec.report, out);
    fmt::print(out, "Bayes residual: {}\n", num(rec.residual));
    emit_report(cfg, to_json(rec), out);
    return exit_code::ok;
}

int cmd_unscathed(const RunConfig &cfg, std::ostream &out) {
    const ChannelRep e = load_channel(cfg);
    const BlochState s = load_state(cfg);
    const UnitalDecomposition d = unital_to_pauli(e, cfg.tol);
    const BlochState reduced = BlochState::from_matrix(d.right * s.matrix() * dagger(d.right));
    const auto index = is_unscathed(d.pauli, reduced);
    const auto res = unscathed_residuals(d.pauli, reduced);
    const Vec3 lambda = d.pauli.lambda();

    fmt::print(out, "reduced Pauli probabilities: ({}, {}, {}, {})\n", num(d.pauli.p()[0]), num(d.pauli.p()[1]),
               num(d.pauli.p()[2]), num(d.pauli.p()[3]));
    fmt::print(out, "reduced state: r = {}\n", vec(reduced.r()));
    fmt::print(out, "unscathed: {}\n", index ? fmt::format("yes, P(rho) = s_{} rho s_{}", *index, *index) : "no");
    fmt::print(out, "residuals |P(rho) - s_k rho s_k|: {} {} {} {}\n", num(res[0]), num(res[1]), num(res[2]), num(res[3]));

    Json report{{"unscathed", index.has_value()},
                {"lambda", {lambda[0], lambda[1], lambda[2]}},
                {"reduced_state", state_to_json(reduced)},
                {"residuals", {res[0], res[1], res[2], res[3]}}};
    if (index) report["sigma"] = *index;
    emit_report(cfg, report, out);
    return exit_code::ok;
}

int cmd_verify(const RunConfig &cfg, std::ostream &out) {
    const ChannelRep e = load_channel(cfg);
    const BlochState s = load_state(cfg);
    require(cfg.inverse_path, "--inverse");
    const ChannelRep f = inverse_from_json(read_json_file(cfg.inverse_path));
    if (!is_cptp(f, cfg.tol)) {
        out << "candidate inverse is not completely positive and trace preserving\n";
        return exit_code::not_cptp;
    }
    const BlochState image = apply(e, s);
    const TwoTimeTable forward = two_time_table(s, e);
    const TwoTimeTable backward = two_time_table(image, f);
    const double discrepancy = time_reversal_discrepancy(e, s, f);
    const double residual = bayes_residual(e, s, f);
    const bool pass = discrepancy <= cfg.tol;

    out << "forward <s_a, s_b> for (rho, E):\n" << table_text(forward);
    out << "reverse <s_a, s_b> for (E(rho), F):\n" << table_text(backward);
    fmt::print(out, "max |<s_a, s_b>_(rho,E) - <s_b, s_a>_(E(rho),F)|: {}\n", num(discrepancy));
    fmt::print(out, "Bayes residual: {}\n", num(residual));
    fmt::print(out, "verdict: {}\n", pass ? "time-reversal symmetric" : "discrepancy exceeds tolerance");

    emit_report(cfg,
                Json{{"forward", table_json(forward)},
                     {"backward", table_json(backward)},
                     {"max_discrepancy", discrepancy},
                     {"bayes_residual", residual},
                     {"tol", cfg.tol},
                     {"pass", pass}},
                out);
    return pass ? exit_code::ok : exit_code::input_error;
}

int cmd_scan(const RunConfig &cfg, std::ostream &out) {
    if (cfg.family == "three-entry") return scan_three(cfg, out);
    return scan_region(cfg, out);
}

int cmd_kraus(const RunConfig &cfg, std::ostream &out) {
    const ChannelRep e = load_channel(cfg);
    const KrausSet ops = e.kraus();
    fmt::print(out, "channel: {} form, {} Kraus operator(s)\n", e.kind_name(), ops.size());
    Json list = Json::array();
    for (std::size_t k = 0; k < ops.size(); ++k) {
        fmt::print(out, "  K{} = {}\n", k, mat2(ops[k]));
        list.push_back(matrix_to_json(ops[k]));
    }
    emit_report(cfg, Json{{"kind", "kraus"}, {"ops", list}}, out);
    return exit_code::ok;
}

int run(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    try {
        cfg.validate();
        switch (cfg.command) {
            case Command::invert:
                return cmd_invert(cfg, out);
            case Command::unscathed:
                return cmd_unscathed(cfg, out);
            case Command::verify:
                return cmd_verify(cfg, out);
            case Command::scan:
                return cmd_scan(cfg, out);
            case Command::kraus:
                return cmd_kraus(cfg, out);
            case Command::three_entry: {
                RunConfig c = cfg;
                c.family = "three-entry";
                return cmd_scan(c, out);
            }
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
    }
    return exit_code::input_error;
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Bayesian inverses of unital qubit channels", "qubit-retro"};
    RunConfig cfg;
    std::string command;
    app.add_option("command", command, "invert | unscathed | verify | scan | kraus | three-entry")
        ->required()
        ->check(CLI::IsMember({"invert", "unscathed", "verify", "scan", "kraus", "three-entry"}));
    app.add_option("--channel", cfg.channel_path, "channel JSON file");
    app.add_option("--state", cfg.state_path, "state JSON file");
    app.add_option("--inverse", cfg.inverse_path, "candidate inverse JSON (channel or invert report)");
    app.add_option("--family", cfg.family, "scan family")
        ->check(CLI::IsMember({"depolarizing", "bb84", "three-entry"}));
    app.add_option("--resolution", cfg.resolution, "grid resolution");
    app.add_option("--tol", cfg.tol, "tolerance for every feasibility and residual check")->capture_default_str();
    app.add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
    app.add_option("--samples", cfg.samples, "Bloch samples per channel in the three-entry sweep")->capture_default_str();
    app.add_option("--threads", cfg.threads, "scan worker threads (0 = all cores)");
    app.add_option("--out", cfg.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_code::input_error;
    }
    cfg.command = parse_command(command);
    return run(cfg, out, err);
}

}  // namespace qretro
