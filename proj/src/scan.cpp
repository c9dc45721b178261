#include "qretro/scan.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include "qretro/errors.hpp"

namespace qretro {

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::vector<RegionCell> scan_family(const ScanGrid &grid, double tol, unsigned threads,
                                    PauliChannel (*family)(double)) {
    grid.validate();
    const std::size_t nt = grid.t_axis.size();
    std::vector<RegionCell> cells(grid.p_axis.size() * nt);
    parallel_for(grid.p_axis.size(), threads, [&](std::size_t ip) {
        const double p = grid.p_axis[ip];
        const PauliChannel channel = family(p);
        for (std::size_t it = 0; it < nt; ++it)
            cells[ip * nt + it] = evaluate_cell(channel, p, grid.t_axis[it], grid.direction, tol);
    });
    return cells;
}

bool depolarizing_feasible(double p, double t, double tol) {
    return evaluate_cell(PauliChannel::depolarizing(p), p, t, {1.0, 0.0, 0.0}, tol).feasible;
}

}  // namespace

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += threads) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) t.join();
    for (auto &e : errors)
        if (e) std::rethrow_exception(e);
}

ScanGrid ScanGrid::uniform(int resolution, const Vec3 &direction) {
    if (resolution < 2) throw InvalidArgument("grid resolution must be at least 2");
    ScanGrid g;
    g.direction = direction;
    const auto n = static_cast<std::size_t>(resolution);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = static_cast<double>(k) / static_cast<double>(n - 1);
        g.p_axis.push_back(x);
        g.t_axis.push_back(x);
    }
    return g;
}

void ScanGrid::validate() const {
    auto check_axis = [](const std::vector<double> &axis, const char *name) {
        for (std::size_t k = 0; k < axis.size(); ++k) {
            if (!(axis[k] >= 0.0 && axis[k] <= 1.0))
                throw InvalidArgument(std::string(name) + " values must lie in [0, 1]");
            if (k > 0 && !(axis[k] > axis[k - 1])) throw InvalidArgument(std::string(name) + " must be strictly increasing");
        }
    };
    check_axis(p_axis, "p_axis");
    check_axis(t_axis, "t_axis");
    if (std::abs(std::sqrt(norm2(direction)) - 1.0) > 1e-12) throw InvalidArgument("scan direction must be a unit vector");
}

DepolarizingQuantities depolarizing_quantities(double lambda, double t) {
    if (!(lambda > -1.0 && lambda < 1.0)) throw DomainError("depolarizing_quantities: lambda must lie in (-1, 1)");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("depolarizing_quantities: t must lie in [0, 1]");
    const double l2 = lambda * lambda;
    const double S = l2 * t;
    if (!(S < 1.0)) throw DomainError("depolarizing_quantities: lambda^2 t must be below 1");
    const double d = 1.0 - S;
    const double d2 = d * d;
    DepolarizingQuantities q;
    q.norm_v2 = (1.0 - l2) * (1.0 - l2) * t / d2;
    q.norm_R2 = l2 / d2 * ((2.0 * l2 * l2 + 1.0) * t * t - 2.0 * (2.0 * l2 + 1.0) * t + 3.0);
    q.norm_Rv2 = l2 * (1.0 - l2) * (1.0 - l2) * (1.0 - t) * (1.0 - t) * t / (d2 * d2);
    q.det_R = l2 * lambda * (t - 1.0) / d;
    q.norm_adjR2 = l2 * l2 / d2 * (2.0 * (1.0 - t) * (1.0 - t) + d2);
    return q;
}

RegionCell evaluate_cell(const PauliChannel &channel, double p, double t, const Vec3 &direction, double tol) {
    const double radius = std::sqrt(t);
    const BlochState state(Vec3{radius * direction[0], radius * direction[1], radius * direction[2]});
    const PauliVerdict verdict = decide_pauli(channel, state, tol);
    RegionCell cell;
    cell.p = p;
    cell.t = t;
    cell.feasible = verdict.feasible;
    cell.slack = verdict.report.slack;
    if (!cell.feasible) {
        if (verdict.route == InverseRoute::adjoint) {
            cell.witness = "not-unscathed";
        } else {
            cell.witness = "inequality-" + std::to_string(verdict.report.failed_inequality().value_or(0) + 1);
        }
    }
    return cell;
}

std::vector<RegionCell> scan_depolarizing(const ScanGrid &grid, double tol, unsigned threads) {
    return scan_family(grid, tol, threads, &PauliChannel::depolarizing);
}

std::vector<RegionCell> scan_bb84(const ScanGrid &grid, double tol, unsigned threads) {
    return scan_family(grid, tol, threads, &PauliChannel::bb84);
}

ChiEstimate boundary_chi(double p, double tol, double feasibility_tol, int check_points) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("boundary_chi: p must lie in (0, 1)");
    if (check_points < 2) throw InvalidArgument("boundary_chi: need at least two check points");

    std::vector<double> ts;
    std::vector<bool> ok;
    for (int k = 0; k < check_points; ++k) {
        ts.push_back(static_cast<double>(k) / (check_points - 1));
        ok.push_back(depolarizing_feasible(p, ts.back(), feasibility_tol));
    }

    ChiEstimate est;
    const auto first_bad = std::find(ok.begin(), ok.end(), false);
    est.monotone = std::find(first_bad, ok.end(), true) == ok.end();
    if (!est.monotone) {
        for (std::size_t k = 0; k < ts.size(); ++k)
            if (ok[k]) est.chi = ts[k];
        return est;
    }
    if (first_bad == ok.end()) {
        est.chi = 1.0;
        return est;
    }
    const auto hi_index = static_cast<std::size_t>(first_bad - ok.begin());
    if (hi_index == 0) {
        // Infeasible already at t = 0 is impossible for a valid channel; report zero.
        est.chi = 0.0;
        return est;
    }
    double lo = ts[hi_index - 1], hi = ts[hi_index];
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (depolarizing_feasible(p, mid, feasibility_tol) ? lo : hi) = mid;
        ++est.bisection_steps;
    }
    est.chi = lo;
    return est;
}

ThreeEntrySummary scan_three_entry(int resolution, int bloch_samples, std::uint64_t seed, double tol, unsigned threads) {
    if (resolution < 8) throw InvalidArgument("scan_three_entry: resolution must be at least 8");
    if (bloch_samples < 0) throw InvalidArgument("scan_three_entry: negative sample count");

    std::vector<std::array<double, 4>> channels;
    for (int zero = 0; zero < 4; ++zero) {
        for (int a = 1; a < resolution; ++a) {
            for (int b = 1; a + b < resolution; ++b) {
                const int c = resolution - a - b;
                const std::array<int, 3> parts{a, b, c};
                std::array<double, 4> p{};
                std::size_t next = 0;
                for (int k = 0; k < 4; ++k)
                    if (k != zero) p[static_cast<std::size_t>(k)] = static_cast<double>(parts[next++]) / resolution;
                channels.push_back(p);
            }
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec3> states{Vec3{0.0, 0.0, 0.0}};
    for (int k = 0; k < bloch_samples; ++k) {
        Vec3 d{gauss(rng), gauss(rng), gauss(rng)};
        const double n = std::sqrt(norm2(d));
        const double radius = std::cbrt(unif(rng));
        states.push_back(Vec3{radius * d[0] / n, radius * d[1] / n, radius * d[2] / n});
    }

    struct ChannelResult {
        bool mixed_ok = false;
        long feasible = 0;
        long unconfirmed = 0;
        std::vector<ThreeEntryHit> hits;
    };
    std::vector<ChannelResult> results(channels.size());
    parallel_for(channels.size(), threads, [&](std::size_t ic) {
        const PauliChannel channel(channels[ic]);
        const ChannelRep rep = ChannelRep::from_pauli(channel);
        ChannelResult &res = results[ic];
        for (std::size_t is = 0; is < states.size(); ++is) {
            const BlochState s(states[is]);
            const PauliVerdict v = decide_pauli(channel, s, tol);
            if (is == 0) {
                res.mixed_ok = v.feasible;
                continue;
            }
            if (!v.feasible || std::sqrt(s.t()) <= 1e-6) continue;
            ++res.feasible;
            const InversionResult full = bayesian_inverse(rep, s, tol);
            if (const auto *rec = std::get_if<InverseRecord>(&full)) {
                const ChannelRep f = rec->channel();
                if (is_cptp(f, tol) && bayes_residual(rep, s, f) <= tol) {
                    res.hits.push_back({channels[ic], s.r(), rec->residual});
                    continue;
                }
            }
            ++res.unconfirmed;
        }
    });

    ThreeEntrySummary summary;
    summary.resolution = resolution;
    summary.channels = static_cast<int>(channels.size());
    summary.bloch_samples = bloch_samples;
    summary.seed = seed;
    summary.cells = static_cast<long>(channels.size() * states.size());
    for (std::size_t ic = 0; ic < channels.size(); ++ic) {
        summary.mixed_feasible += results[ic].mixed_ok ? 1 : 0;
        summary.unconfirmed += results[ic].unconfirmed;
        summary.hits.insert(summary.hits.end(), results[ic].hits.begin(), results[ic].hits.end());
        summary.per_channel.emplace_back(channels[ic], results[ic].feasible);
    }
    return summary;
}

std::string emit_csv(const std::vector<RegionCell> &cells) {
    std::string out = "p,t,feasible,slack1,slack2,slack3\n";
    for (const auto &c : cells) {
        out += fmt::format("{},{},{},{},{},{}\n", num(c.p), num(c.t), c.feasible ? 1 : 0, num(c.slack[0]),
                           num(c.slack[1]), num(c.slack[2]));
    }
    return out;
}

std::string emit_svg(const std::vector<RegionCell> &cells, const std::string &title) {
    std::map<double, std::size_t> ps, ts;
    for (const auto &c : cells) {
        ps.emplace(c.p, 0);
        ts.emplace(c.t, 0);
    }
    std::size_t k = 0;
    for (auto &[_, idx] : ps) idx = k++;
    k = 0;
    for (auto &[_, idx] : ts) idx = k++;

    constexpr double plot = 400.0, margin = 60.0;
    const double cw = ps.empty() ? plot : plot / static_cast<double>(ps.size());
    const double ch = ts.empty() ? plot : plot / static_cast<double>(ts.size());
    const double width = plot + 2 * margin, height = plot + 2 * margin;

    std::string out = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
        width, height);
    if (!title.empty()) {
        std::string escaped;
        for (char c : title) {
            switch (c) {
                case '&':
                    escaped += "&amp;";
                    break;
                case '<':
                    escaped += "&lt;";
                    break;
                case '>':
                    escaped += "&gt;";
                    break;
                default:
                    escaped += c;
            }
        }
        out += fmt::format("<title>{}</title>\n", escaped);
    }
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\" stroke=\"#000000\"/>\n",
                       margin, margin, plot, plot);
    out += "<g shape-rendering=\"crispEdges\">\n";
    for (const auto &c : cells) {
        const double x = margin + cw * static_cast<double>(ps.at(c.p));
        const double y = margin + plot - ch * static_cast<double>(ts.at(c.t) + 1);
        out += fmt::format("<rect x=\"{:.4f}\" y=\"{:.4f}\" width=\"{:.4f}\" height=\"{:.4f}\" fill=\"{}\"/>\n", x, y, cw,
                           ch, c.feasible ? "#7b3fa0" : "#eeeeee");
    }
    out += "</g>\n";
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"16\">p</text>\n", margin + plot / 2,
                       margin + plot + 40);
    out += fmt::format(
        "<text x=\"{0}\" y=\"{1}\" text-anchor=\"middle\" font-size=\"16\" transform=\"rotate(-90 {0} {1})\">"
        "‖r‖²</text>\n",
        margin - 35, margin + plot / 2);
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\">0</text>\n", margin - 4, margin + plot + 16);
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\">1</text>\n", margin + plot - 4, margin + plot + 16);
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\">1</text>\n", margin - 16, margin + 4);
    out += "</svg>\n";
    return out;
}

}  // namespace qretro
