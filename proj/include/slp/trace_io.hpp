#pragma once

#include <string>

#include "slp/dynamics.hpp"
#include "slp/params.hpp"
#include "slp/trace.hpp"

namespace slp::io {

// CSV with header "t_us, ch, end, intensity"; rows in fixed channel/end/time
// order so identical inputs give byte-identical files.
std::string traces_to_csv(const TraceSet& traces);
void write_traces_csv(const std::string& path, const TraceSet& traces);
TraceSet read_traces_csv(const std::string& path);

// JSON sidecar carrying the full parameter set, grid, and ledger history.
std::string run_sidecar_json(const params::ParameterSet& params,
                             const dynamics::Grid& grid,
                             const TraceSet& traces);
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace slp::io
