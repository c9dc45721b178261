#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "qretro/bayes.hpp"
#include "qretro/channel.hpp"
#include "qretro/scan.hpp"

namespace qretro {

using Json = nlohmann::json;

/// Channel objects:
///   {"kind":"pauli","p":[p0,p1,p2,p3]}
///   {"kind":"kraus","ops":[[[re,im] x 4], ...]}   (each op row-major)
///   {"kind":"ptm","m":[16 reals]}                  (row-major)
///   {"kind":"choi","m":[[re,im] x 16]}             (row-major)
/// Real matrix entries may also be written as plain numbers.
/// Throws InvalidArgument on malformed input.
ChannelRep channel_from_json(const Json &j);
/// Kraus form when the map is completely positive, PTM form otherwise.
Json channel_to_json(const ChannelRep &ch);

/// {"bloch":[r1,r2,r3]}
BlochState state_from_json(const Json &j);
Json state_to_json(const BlochState &s);

/// Accepts a channel object or an invert report carrying one under "inverse".
ChannelRep inverse_from_json(const Json &j);

Json to_json(const FeasibilityReport &r);
Json to_json(const InverseRecord &r);
Json to_json(const NoInverse &n);

Json complex_to_json(cplx z);
Json matrix_to_json(const CMat2 &m);

/// Throws InvalidArgument when the file cannot be read or parsed.
Json read_json_file(const std::string &path);
std::string read_text_file(const std::string &path);
/// Throws Error when the file cannot be written.
void write_text_file(const std::string &path, const std::string &contents);

}  // namespace qretro
