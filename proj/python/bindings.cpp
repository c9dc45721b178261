#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qretro/bayes.hpp"
#include "qretro/channel.hpp"
#include "qretro/errors.hpp"
#include "qretro/io.hpp"
#include "qretro/scan.hpp"

namespace py = pybind11;
using namespace qretro;

namespace {

using Rows2 = std::array<std::array<cplx, 2>, 2>;

CMat2 to_mat(const Rows2 &rows) {
    CMat2 m;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(i, j) = rows[i][j];
    return m;
}

template <std::size_t N>
std::vector<std::vector<cplx>> to_rows(const SquareMatrix<cplx, N> &m) {
    std::vector<std::vector<cplx>> out(N, std::vector<cplx>(N));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out[i][j] = m(i, j);
    return out;
}

template <std::size_t N>
std::vector<std::vector<double>> to_rows(const SquareMatrix<double, N> &m) {
    std::vector<std::vector<double>> out(N, std::vector<double>(N));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out[i][j] = m(i, j);
    return out;
}

py::dict report_dict(const FeasibilityReport &r) {
    py::dict d;
    d["v"] = r.v;
    d["R"] = to_rows(r.R);
    d["eta"] = r.eta;
    d["detR"] = r.detR;
    d["normRv2"] = r.normRv2;
    d["normAdjR2"] = r.normAdjR2;
    d["slacks"] = r.slack;
    d["feasible"] = r.feasible;
    d["min_choi_eigenvalue"] = r.min_choi_eigenvalue;
    return d;
}

py::dict result_dict(const InversionResult &res) {
    py::dict d;
    if (const auto *rec = std::get_if<InverseRecord>(&res)) {
        d["found"] = true;
        d["route"] = rec->route == InverseRoute::analytic ? "analytic" : "adjoint";
        d["unique"] = rec->unique;
        d["S"] = rec->S;
        d["a"] = to_rows(rec->a.a);
        std::vector<std::vector<std::vector<cplx>>> kraus;
        for (const auto &k : rec->kraus) kraus.push_back(to_rows(k));
        d["kraus"] = kraus;
        d["choi"] = to_rows(rec->choi);
        d["residual"] = rec->residual;
        d["report"] = report_dict(rec->report);
        d["inverse_json"] = channel_to_json(rec->channel()).dump();
        return d;
    }
    const auto &none = std::get<NoInverse>(res);
    d["found"] = false;
    d["reason"] = to_string(none.reason);
    d["message"] = none.message;
    d["lambda"] = none.lambda;
    d["unscathed_residuals"] = none.unscathed_residuals;
    if (none.report) d["report"] = report_dict(*none.report);
    return d;
}

py::dict cell_dict(const RegionCell &c) {
    py::dict d;
    d["p"] = c.p;
    d["t"] = c.t;
    d["feasible"] = c.feasible;
    d["slack"] = c.slack;
    if (c.witness) d["witness"] = *c.witness;
    return d;
}

}  // namespace

PYBIND11_MODULE(qubit_retro, m) {
    m.doc() = "Bayesian inverses of unital qubit channels";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    py::class_<BlochState>(m, "BlochState")
        .def(py::init<>())
        .def(py::init<const Vec3 &>(), py::arg("r"))
        .def_property_readonly("r", &BlochState::r)
        .def_property_readonly("t", &BlochState::t)
        .def("purity", &BlochState::purity)
        .def("matrix", [](const BlochState &s) { return to_rows(s.matrix()); });

    py::class_<PauliChannel>(m, "PauliChannel")
        .def(py::init<const std::array<double, 4> &>(), py::arg("p"))
        .def_static("from_lambda", &PauliChannel::from_lambda)
        .def_static("depolarizing", &PauliChannel::depolarizing)
        .def_static("bb84", &PauliChannel::bb84)
        .def_property_readonly("p", &PauliChannel::p)
        .def("lambda_", &PauliChannel::lambda)
        .def("support_size", &PauliChannel::support_size, py::arg("eps") = 1e-12);

    py::class_<ChannelRep>(m, "Channel")
        .def_static("from_pauli", &ChannelRep::from_pauli)
        .def_static("from_kraus",
                    [](const std::vector<Rows2> &ops) {
                        KrausSet set;
                        for (const auto &op : ops) set.push_back(to_mat(op));
                        return ChannelRep::from_kraus(std::move(set));
                    })
        .def_static("unitary", [](const Rows2 &u) { return ChannelRep::unitary(to_mat(u)); })
        .def_static("from_json", [](const std::string &text) { return channel_from_json(Json::parse(text)); })
        .def("to_json", [](const ChannelRep &c) { return channel_to_json(c).dump(); })
        .def_property_readonly("kind", &ChannelRep::kind_name)
        .def("ptm", [](const ChannelRep &c) { return to_rows(c.ptm()); })
        .def("choi", [](const ChannelRep &c) { return to_rows(c.choi()); })
        .def("kraus",
             [](const ChannelRep &c) {
                 std::vector<std::vector<std::vector<cplx>>> out;
                 for (const auto &k : c.kraus()) out.push_back(to_rows(k));
                 return out;
             })
        .def("apply", [](const ChannelRep &c, const BlochState &s) { return apply(c, s); })
        .def("is_cptp", [](const ChannelRep &c, double tol) { return is_cptp(c, tol); }, py::arg("tol") = 1e-10)
        .def("is_unital", &ChannelRep::is_unital, py::arg("tol") = 1e-10);

    m.def("bayesian_inverse",
          [](const ChannelRep &e, const BlochState &s, double tol) { return result_dict(bayesian_inverse(e, s, tol)); },
          py::arg("channel"), py::arg("state"), py::arg("tol") = kDefaultTol);
    m.def("bayes_residual", &bayes_residual, py::arg("channel"), py::arg("state"), py::arg("inverse"));
    m.def("time_reversal_discrepancy", &time_reversal_discrepancy, py::arg("channel"), py::arg("state"),
          py::arg("inverse"));
    m.def("two_time_table", &two_time_table, py::arg("state"), py::arg("channel"));
    m.def("is_unscathed", &is_unscathed, py::arg("channel"), py::arg("state"));
    m.def("adjoint_is_inverse", &adjoint_is_inverse, py::arg("channel"), py::arg("state"));
    m.def("decide_pauli",
          [](const PauliChannel &p, const BlochState &s, double tol) {
              const PauliVerdict v = decide_pauli(p, s, tol);
              py::dict d;
              d["feasible"] = v.feasible;
              d["route"] = v.route == InverseRoute::analytic ? "analytic" : "adjoint";
              if (v.unscathed_index) d["unscathed_index"] = *v.unscathed_index;
              d["report"] = report_dict(v.report);
              return d;
          },
          py::arg("channel"), py::arg("state"), py::arg("tol") = kDefaultTol);

    m.def("depolarizing_quantities", [](double lambda, double t) {
        const auto q = depolarizing_quantities(lambda, t);
        py::dict d;
        d["norm_v2"] = q.norm_v2;
        d["norm_R2"] = q.norm_R2;
        d["norm_Rv2"] = q.norm_Rv2;
        d["det_R"] = q.det_R;
        d["norm_adjR2"] = q.norm_adjR2;
        return d;
    });
    m.def("boundary_chi", [](double p, double tol) { return boundary_chi(p, tol).chi; }, py::arg("p"),
          py::arg("tol") = 1e-10);

    auto scan = [](const std::string &family, int resolution, double tol) {
        const bool dep = family == "depolarizing";
        if (!dep && family != "bb84") throw InvalidArgument("family must be depolarizing or bb84");
        const ScanGrid grid = ScanGrid::uniform(resolution, dep ? Vec3{1.0, 0.0, 0.0} : diagonal_direction());
        return dep ? scan_depolarizing(grid, tol) : scan_bb84(grid, tol);
    };
    m.def("scan",
          [scan](const std::string &family, int resolution, double tol) {
              py::list out;
              for (const auto &c : scan(family, resolution, tol)) out.append(cell_dict(c));
              return out;
          },
          py::arg("family"), py::arg("resolution"), py::arg("tol") = kDefaultTol);
    m.def("scan_csv",
          [scan](const std::string &family, int resolution, double tol) { return emit_csv(scan(family, resolution, tol)); },
          py::arg("family"), py::arg("resolution"), py::arg("tol") = kDefaultTol);
    m.def("scan_svg",
          [scan](const std::string &family, int resolution, double tol) {
              return emit_svg(scan(family, resolution, tol), family);
          },
          py::arg("family"), py::arg("resolution"), py::arg("tol") = kDefaultTol);
}
