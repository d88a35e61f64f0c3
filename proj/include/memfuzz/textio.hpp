#pragma once

// The .psys text format and the JSON trace documents.
//
// A .psys file is line oriented; `#` starts a comment.
//
//   system NAME
//   grades 0 1/2 1
//   reactives v w alpha:role=alpha hash:role=hash
//   outputs v
//   membrane 1 parent env output
//   membrane 2 parent 1
//   init 1 { w@1 : 2 }
//   init env { v : inf }
//   rule 1 antiport in { v:1 } out { w:1 } tin { v : 1/2 } tout { w : 1 }
//
// A bare reactive in `init` means grade 1 inside a membrane and every grade
// of I⁺ in env. Threshold entries left out of tin/tout default to 1.

#include "memfuzz/error.hpp"
#include "memfuzz/outputs.hpp"
#include "memfuzz/system_model.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace memfuzz {

inline constexpr std::string_view tool_version = "memfuzz 0.1.0";
inline constexpr std::string_view trace_schema = "memfuzz-trace/1";

struct SystemDocument {
    std::string name;
    PSystem system;

    friend bool operator==(const SystemDocument&, const SystemDocument&) = default;
};

struct ParseError {
    std::size_t line = 0;
    std::size_t column = 0;
    std::string message;

    [[nodiscard]] std::string to_string() const;
};

struct ParseResult {
    std::optional<SystemDocument> document;
    std::vector<ParseError> errors;

    [[nodiscard]] bool ok() const { return document.has_value(); }
};

class ParseFailure : public Error {
public:
    ParseFailure(std::string source, std::vector<ParseError> errors);
    std::vector<ParseError> errors;
};

/// Syntax and declaration checks only; semantic rules are left to validate().
ParseResult parse(std::string_view text);
/// Throws ParseFailure; `source` prefixes the messages.
SystemDocument parse_or_throw(std::string_view text, const std::string& source = "<input>");
SystemDocument load_document(const std::filesystem::path& path);

/// Canonical text. Membrane contents always carry explicit grades; env
/// entries are written bare when homogeneous over I⁺.
std::string render(const SystemDocument& document);

/// A crisp system written as a file over I = {0,1}.
SystemDocument crisp_document(std::string name, const CrispPSystem& crisp);

/// An exploration together with everything needed to re-read it.
struct TraceDocument {
    std::string tool = std::string(tool_version);
    SystemDocument system;
    ExplorationBounds bounds;
    bool dedup_by_result = true;
    GenReport report;
};

TraceDocument make_trace(const SystemDocument& system, const ExploreOptions& options, GenReport report);
/// Pretty-printed JSON with sorted keys; equal documents give equal bytes.
std::string serialize(const TraceDocument& trace);
/// Throws Error on malformed input or a schema mismatch.
TraceDocument load_trace(std::string_view json);
/// Recomputes histograms and gen from the stored configurations.
GenReport resummarize(const TraceDocument& trace);

/// One-line text form of a configuration: "env{v@1:inf} 1{w@1:2} 2{}".
std::string describe(const PSystem& system, const Configuration& c);
std::string describe(const PSystem& system, const TransitionChoice& choice);

} // namespace memfuzz
