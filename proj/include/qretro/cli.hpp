#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "qretro/bayes.hpp"

namespace qretro {

enum class Command { invert, unscathed, verify, scan, kraus, three_entry };

/// Accepts "invert", "unscathed", "verify", "scan", "kraus" and "three-entry".
Command parse_command(const std::string &name);
std::string command_name(Command c);

struct RunConfig {
    Command command = Command::invert;
    std::string channel_path;
    std::string state_path;
    std::string inverse_path;
    /// depolarizing, bb84 or three-entry.
    std::string family = "depolarizing";
    /// Reports go to `<out>/<command>.json`; empty prints them after the text summary.
    /// Scans write `<out>/<family>_<resolution>.csv|svg` and default to the working directory.
    std::string out_dir;
    double tol = kDefaultTol;
    std::uint64_t seed = 0;
    /// 0 picks the family default (201 for region scans, 8 for the three-entry sweep).
    int resolution = 0;
    int samples = 1000;
    /// 0 means unlimited; QUBIT_RETRO_THREADS caps it further.
    unsigned threads = 0;

    /// Throws InvalidArgument unless tol > 0 and resolution is 0 or >= 2.
    void validate() const;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int input_error = 1;
inline constexpr int no_inverse = 2;
inline constexpr int not_cptp = 3;
}  // namespace exit_code

/// Worker count for scans after applying QUBIT_RETRO_THREADS.
unsigned effective_threads(unsigned requested);

int cmd_invert(const RunConfig &cfg, std::ostream &out);
int cmd_unscathed(const RunConfig &cfg, std::ostream &out);
int cmd_verify(const RunConfig &cfg, std::ostream &out);
int cmd_scan(const RunConfig &cfg, std::ostream &out);
int cmd_kraus(const RunConfig &cfg, std::ostream &out);

/// Dispatches on cfg.command; library errors become exit code 1 with a message on `err`.
int run(const RunConfig &cfg, std::ostream &out, std::ostream &err);

/// Parses `qubit-retro <command> [options]` and runs it.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace qretro
