#include "qretro/io.hpp"

#include <fstream>
#include <sstream>

#include "qretro/errors.hpp"

namespace qretro {

namespace {

double number(const Json &j, const char *what) {
    if (!j.is_number()) throw InvalidArgument(std::string(what) + ": expected a number");
    return j.get<double>();
}

cplx complex_from_json(const Json &j, const char *what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {number(j[0], what), number(j[1], what)};
    throw InvalidArgument(std::string(what) + ": expected [re, im] or a number");
}

template <std::size_t N>
SquareMatrix<cplx, N> complex_matrix(const Json &j, const char *what) {
    if (!j.is_array() || j.size() != N * N)
        throw InvalidArgument(std::string(what) + ": expected " + std::to_string(N * N) + " row-major entries");
    SquareMatrix<cplx, N> m;
    for (std::size_t k = 0; k < N * N; ++k) m.data[k] = complex_from_json(j[k], what);
    return m;
}

const Json &field(const Json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

}  // namespace

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json matrix_to_json(const CMat2 &m) {
    Json out = Json::array();
    for (const auto &z : m.data) out.push_back(complex_to_json(z));
    return out;
}

ChannelRep channel_from_json(const Json &j) {
    const Json &kind_j = field(j, "kind");
    if (!kind_j.is_string()) throw InvalidArgument("\"kind\" must be a string");
    const std::string kind = kind_j.get<std::string>();
    if (kind == "pauli") {
        const Json &p = field(j, "p");
        if (!p.is_array() || p.size() != 4) throw InvalidArgument("pauli: \"p\" must hold four probabilities");
        std::array<double, 4> probs{};
        for (std::size_t k = 0; k < 4; ++k) probs[k] = number(p[k], "pauli");
        return ChannelRep::from_pauli(PauliChannel(probs));
    }
    if (kind == "kraus") {
        const Json &ops = field(j, "ops");
        if (!ops.is_array() || ops.empty()) throw InvalidArgument("kraus: \"ops\" must be a non-empty list");
        KrausSet set;
        for (const auto &op : ops) set.push_back(complex_matrix<2>(op, "kraus"));
        return ChannelRep::from_kraus(std::move(set));
    }
    if (kind == "ptm") {
        const Json &m = field(j, "m");
        if (!m.is_array() || m.size() != 16) throw InvalidArgument("ptm: \"m\" must hold 16 reals");
        RMat4 r;
        for (std::size_t k = 0; k < 16; ++k) r.data[k] = number(m[k], "ptm");
        return ChannelRep::from_ptm(r);
    }
    if (kind == "choi") return ChannelRep::from_choi(complex_matrix<4>(field(j, "m"), "choi"));
    throw InvalidArgument("unknown channel kind \"" + kind + "\"");
}

Json channel_to_json(const ChannelRep &ch) {
    KrausSet ops;
    try {
        ops = ch.kraus();
    } catch (const NotPSD &) {
        Json m = Json::array();
        for (double x : ch.ptm().data) m.push_back(x);
        return Json{{"kind", "ptm"}, {"m", m}};
    }
    Json list = Json::array();
    for (const auto &k : ops) list.push_back(matrix_to_json(k));
    return Json{{"kind", "kraus"}, {"ops", list}};
}

BlochState state_from_json(const Json &j) {
    const Json &b = field(j, "bloch");
    if (!b.is_array() || b.size() != 3) throw InvalidArgument("state: \"bloch\" must hold three reals");
    return BlochState(Vec3{number(b[0], "bloch"), number(b[1], "bloch"), number(b[2], "bloch")});
}

Json state_to_json(const BlochState &s) { return Json{{"bloch", {s.r()[0], s.r()[1], s.r()[2]}}}; }

ChannelRep inverse_from_json(const Json &j) {
    if (j.is_object() && j.contains("inverse")) return channel_from_json(j.at("inverse"));
    return channel_from_json(j);
}

Json to_json(const FeasibilityReport &r) {
    Json R = Json::array();
    for (double x : r.R.data) R.push_back(x);
    Json out{{"v", {r.v[0], r.v[1], r.v[2]}},
             {"R", R},
             {"eta", r.eta},
             {"detR", r.detR},
             {"normRv2", r.normRv2},
             {"normAdjR2", r.normAdjR2},
             {"slacks", {r.slack[0], r.slack[1], r.slack[2]}},
             {"feasible", r.feasible},
             {"min_choi_eigenvalue", r.min_choi_eigenvalue}};
    if (auto k = r.failed_inequality()) out["failed_inequality"] = *k + 1;
    return out;
}

Json to_json(const InverseRecord &r) {
    Json a = Json::array();
    for (double x : r.a.a.data) a.push_back(x);
    Json choi = Json::array();
    for (const auto &z : r.choi.data) choi.push_back(complex_to_json(z));
    Json kraus = Json::array();
    for (const auto &k : r.kraus) kraus.push_back(matrix_to_json(k));
    return Json{{"verdict", "inverse"},
                {"route", r.route == InverseRoute::analytic ? "analytic" : "adjoint"},
                {"unique", r.unique},
                {"S", r.S},
                {"a", a},
                {"choi", choi},
                {"kraus", kraus},
                {"feasibility", to_json(r.report)},
                {"residual", r.residual},
                {"inverse", channel_to_json(r.channel())}};
}

Json to_json(const NoInverse &n) {
    const auto &u = n.unscathed_residuals;
    Json out{{"verdict", "no-inverse"},
             {"reason", to_string(n.reason)},
             {"message", n.message},
             {"lambda", {n.lambda[0], n.lambda[1], n.lambda[2]}},
             {"unscathed_residuals", {u[0], u[1], u[2], u[3]}}};
    if (n.report) out["feasibility"] = to_json(*n.report);
    return out;
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json_file(const std::string &path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

void write_text_file(const std::string &path, const std::string &contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << contents;
    if (!out) throw Error("write failed for " + path);
}

}  // namespace qretro
