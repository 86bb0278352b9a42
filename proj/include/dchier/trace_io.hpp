#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "dchier/simulation.hpp"

namespace dchier {

std::string trace_header(Index dofs);
/// CSV with one row per tick; doubles are printed with round-trip precision.
void write_trace_csv(std::ostream& out, const TraceLog& trace);
std::string trace_csv(const TraceLog& trace);

/// Writes through a sibling temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace dchier
