#pragma once

// Tables derived from trial logs: per-trial summary, the contact/token
// raster, and per-tick prediction traces.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pavsig/harness.hpp"

namespace pavsig {

struct SummaryRow {
    int trial = 0;
    std::string algorithm;
    double lambda = 0.0;
    int lookahead = 0;
    int contacts = 0;
    int tokens = 0;
    int motions = 0;
    std::int64_t ticks = 0;
    std::uint64_t seed = 0;
};

enum class RasterKind { contact, token };

struct RasterRow {
    int trial = 0;
    std::int64_t tick = 0;
    RasterKind kind = RasterKind::token;
    double prediction = 0.0;
    int shoulder_bin = 0;
    int motion_index = 0;
};

SummaryRow summary_row(const TrialLog& log);

// One row per contact onset and per prediction token, ordered by trial then
// tick.
std::vector<RasterRow> raster_rows(std::span<const TrialLog> logs);

enum class ReportFormat { csv, jsonl };

// Header: trial,algorithm,lambda,lookahead,contacts,tokens,motions,ticks,seed
std::string summary_table(std::span<const TrialLog> logs, ReportFormat fmt);
std::string raster_table(std::span<const TrialLog> logs, ReportFormat fmt);
// trial,tick,shoulder_pos,prediction,contact_raw,token
std::string trace_table(std::span<const TrialLog> logs, ReportFormat fmt);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace pavsig
