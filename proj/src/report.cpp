#include "pavsig/report.hpp"

#include <algorithm>
#include <charconv>

#include "pavsig/trial_log.hpp"

namespace pavsig {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

SummaryRow summary_row(const TrialLog& log) {
    const auto& s = log.summary;
    SummaryRow r;
    r.trial = s.trial;
    r.algorithm = std::string(algorithm_name(s.config.signalling.algorithm));
    r.lambda = s.config.signalling.algorithm == SignalAlgorithm::td0 ? 0.0 : s.config.signalling.lambda;
    r.lookahead = s.config.signalling.algorithm == SignalAlgorithm::la_td ? s.config.signalling.lookahead_bins : 0;
    r.contacts = s.contacts_total;
    r.tokens = s.tokens_total;
    r.motions = s.motions;
    r.ticks = s.duration_ticks;
    r.seed = s.config.signalling.seed;
    return r;
}

std::vector<RasterRow> raster_rows(std::span<const TrialLog> logs) {
    std::vector<RasterRow> rows;
    for (const TrialLog& log : logs) {
        bool was_contact = false;
        for (const TrialEvent& ev : log.events) {
            const bool contact = ev.token && ev.token->cause == TokenCause::contact;
            if (contact && !was_contact) {
                rows.push_back({log.summary.trial, ev.tick, RasterKind::contact, ev.prediction,
                                ev.shoulder_bin, ev.motion_index});
            }
            if (ev.token && ev.token->cause == TokenCause::prediction) {
                rows.push_back({log.summary.trial, ev.tick, RasterKind::token, ev.prediction,
                                ev.shoulder_bin, ev.motion_index});
            }
            was_contact = contact;
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const RasterRow& a, const RasterRow& b) {
        return a.trial != b.trial ? a.trial < b.trial : a.tick < b.tick;
    });
    return rows;
}

std::string summary_table(std::span<const TrialLog> logs, ReportFormat fmt) {
    std::string out;
    if (fmt == ReportFormat::csv) out = "trial,algorithm,lambda,lookahead,contacts,tokens,motions,ticks,seed\n";
    for (const TrialLog& log : logs) {
        const SummaryRow r = summary_row(log);
        if (fmt == ReportFormat::csv) {
            out += std::to_string(r.trial) + ',' + r.algorithm + ',' + format_double(r.lambda) + ',' +
                   std::to_string(r.lookahead) + ',' + std::to_string(r.contacts) + ',' +
                   std::to_string(r.tokens) + ',' + std::to_string(r.motions) + ',' +
                   std::to_string(r.ticks) + ',' + std::to_string(r.seed) + '\n';
        } else {
            nlohmann::ordered_json j;
            j["trial"] = r.trial;
            j["algorithm"] = r.algorithm;
            j["lambda"] = r.lambda;
            j["lookahead"] = r.lookahead;
            j["contacts"] = r.contacts;
            j["tokens"] = r.tokens;
            j["motions"] = r.motions;
            j["ticks"] = r.ticks;
            j["seed"] = r.seed;
            out += j.dump() + '\n';
        }
    }
    return out;
}

std::string raster_table(std::span<const TrialLog> logs, ReportFormat fmt) {
    std::string out;
    if (fmt == ReportFormat::csv) out = "trial,tick,kind,prediction,shoulder_bin,motion_index\n";
    for (const RasterRow& r : raster_rows(logs)) {
        const char* kind = r.kind == RasterKind::contact ? "contact" : "token";
        if (fmt == ReportFormat::csv) {
            out += std::to_string(r.trial) + ',' + std::to_string(r.tick) + ',' + kind + ',' +
                   format_double(r.prediction) + ',' + std::to_string(r.shoulder_bin) + ',' +
                   std::to_string(r.motion_index) + '\n';
        } else {
            nlohmann::ordered_json j;
            j["trial"] = r.trial;
            j["tick"] = r.tick;
            j["kind"] = kind;
            j["prediction"] = r.prediction;
            j["shoulder_bin"] = r.shoulder_bin;
            j["motion_index"] = r.motion_index;
            out += j.dump() + '\n';
        }
    }
    return out;
}

std::string trace_table(std::span<const TrialLog> logs, ReportFormat fmt) {
    std::string out;
    if (fmt == ReportFormat::csv) out = "trial,tick,shoulder_pos,prediction,contact_raw,token\n";
    for (const TrialLog& log : logs) {
        for (const TrialEvent& ev : log.events) {
            const char* token = !ev.token ? "" : ev.token->cause == TokenCause::contact ? "contact" : "prediction";
            if (fmt == ReportFormat::csv) {
                out += std::to_string(log.summary.trial) + ',' + std::to_string(ev.tick) + ',' +
                       format_double(ev.shoulder_pos) + ',' + format_double(ev.prediction) + ',' +
                       format_double(ev.contact_raw) + ',' + token + '\n';
            } else {
                nlohmann::ordered_json j;
                j["trial"] = log.summary.trial;
                j["tick"] = ev.tick;
                j["shoulder_pos"] = ev.shoulder_pos;
                j["prediction"] = ev.prediction;
                j["contact_raw"] = ev.contact_raw;
                j["token"] = token;
                out += j.dump() + '\n';
            }
        }
    }
    return out;
}

}  // namespace pavsig
