#pragma once

// Counts files, atomic writes and report serialization.
//
// A counts file is whitespace-separated text: a header line
//
//   type m f c n1 n0 sn1 sn0
//
// followed by the 15 trio types in table order. Blank lines and lines
// starting with '#' are ignored.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "imprint/inference.hpp"
#include "imprint/likelihood.hpp"
#include "imprint/mcem.hpp"

namespace imprint::io {

using Json = nlohmann::ordered_json;

std::string format_counts(const FamilyCounts& y);
// Throws ParseError (with `source` and a line number) on malformed input.
FamilyCounts parse_counts(std::istream& in, const std::string& source);
FamilyCounts read_counts_file(const std::filesystem::path& path);
void write_counts_file(const std::filesystem::path& path, const FamilyCounts& y);

// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Pretty-printed JSON followed by a newline.
std::string dump(const Json& j);

Json to_json(const DiseaseModel& theta);
DiseaseModel disease_model_from_json(const Json& j);
Json to_json(const DirichletParams& alpha);
Json to_json(const FitSummary& s);
Json to_json(const TestResult& r);
Json fit_report(const McemFit& fit);

std::string fit_report_text(const McemFit& fit);
std::string test_report_text(const std::vector<TestResult>& results);

}  // namespace imprint::io
