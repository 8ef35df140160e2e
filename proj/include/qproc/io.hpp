#pragma once

// Loading sources and protocols from preset URIs or JSON files, and JSON
// serialization of reports.

#include <string>

#include <json.hpp>

#include "qproc/qmeasures.hpp"
#include "qproc/sync.hpp"
#include "qproc/tomography.hpp"

namespace qproc {

using Json = nlohmann::ordered_json;

struct LoadedSource {
    std::string ref;
    std::string preset; // empty for file sources
    Params params;
    Source source;
};

// "preset:name?key=value&key=value" or a path to a source JSON file.
LoadedSource loadSource(const std::string& ref);
Source sourceFromJson(const nlohmann::json& j);
Json sourceToJson(const Source& src);

// "repeated:<instrument>", "preset:<name>" or a path to a protocol JSON file.
DQMP loadProtocol(const std::string& ref, const LoadedSource& src);
DQMP protocolFromJson(const nlohmann::json& j, const Source* src);
POVM instrumentFromJson(const nlohmann::json& j, const Source* src);

// Parses text as JSON; errors carry the file name and line.
nlohmann::json parseJsonText(const std::string& text, const std::string& origin);
nlohmann::json readJsonFile(const std::string& path);

Json toJson(const MarkovOrder& o);
Json toJson(const QuantumMeasureTable& t);
Json toJson(const ClassicalMeasureTable& t);
Json toJson(const UncertaintyCurve& c);
Json toJson(const BeliefMachine& m, const Source& src);
Json toJson(const DensityMatrix& rho);
Json toJson(const ReconstructionReport& r, const QuantumAlphabet* q);

} // namespace qproc
