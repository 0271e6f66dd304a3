#include "pavsig/trial_log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pavsig {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json config_to_json(const ExperimentConfig& cfg) {
    const auto& s = cfg.signalling;
    const auto& w = cfg.world;
    ordered_json j;
    j["algorithm"] = algorithm_name(s.algorithm);
    j["lambda"] = s.lambda;
    j["lookahead"] = s.lookahead_bins;
    j["threshold"] = s.threshold;
    j["trials"] = s.trials;
    j["motions_per_trial"] = s.motions_per_trial;
    j["seed"] = s.seed;
    j["tick_ms"] = w.tick_ms;
    j["bins"] = w.bins;
    j["max_step"] = w.servo.max_step;
    j["jitter_bins"] = w.servo.jitter_bins;
    j["overshoot_prob"] = w.servo.overshoot_prob;
    j["latency_ticks"] = w.servo.latency_ticks;
    j["left_wall"] = w.workspace.left_wall;
    j["right_wall"] = w.workspace.right_wall;
    j["contact_high"] = w.workspace.contact_high;
    j["contact_detect_threshold"] = w.workspace.contact_detect_threshold;
    j["pilot"] = pilot_name(cfg.pilot.mode);
    j["backoff_bins"] = cfg.pilot.backoff_bins;
    j["onset_delay_ms"] = cfg.pilot.onset_delay_ms;
    j["reaction_ms"] = cfg.pilot.reaction_ms;
    j["max_ticks"] = cfg.max_ticks_per_trial;
    return j;
}

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    auto& s = cfg.signalling;
    auto& w = cfg.world;
    if (auto it = j.find("algorithm"); it != j.end()) {
        const auto name = it->get<std::string>();
        const auto a = parse_algorithm(name);
        if (!a) throw std::invalid_argument("unknown algorithm '" + name + "'");
        s.algorithm = *a;
    }
    read_if(j, "lambda", s.lambda);
    read_if(j, "lookahead", s.lookahead_bins);
    read_if(j, "threshold", s.threshold);
    read_if(j, "trials", s.trials);
    read_if(j, "motions_per_trial", s.motions_per_trial);
    read_if(j, "seed", s.seed);
    read_if(j, "tick_ms", w.tick_ms);
    read_if(j, "bins", w.bins);
    read_if(j, "max_step", w.servo.max_step);
    read_if(j, "jitter_bins", w.servo.jitter_bins);
    read_if(j, "overshoot_prob", w.servo.overshoot_prob);
    read_if(j, "latency_ticks", w.servo.latency_ticks);
    read_if(j, "left_wall", w.workspace.left_wall);
    read_if(j, "right_wall", w.workspace.right_wall);
    read_if(j, "contact_high", w.workspace.contact_high);
    read_if(j, "contact_detect_threshold", w.workspace.contact_detect_threshold);
    if (auto it = j.find("pilot"); it != j.end()) {
        const auto name = it->get<std::string>();
        const auto m = parse_pilot(name);
        if (!m) throw std::invalid_argument("unknown pilot '" + name + "'");
        cfg.pilot.mode = *m;
    }
    read_if(j, "backoff_bins", cfg.pilot.backoff_bins);
    read_if(j, "onset_delay_ms", cfg.pilot.onset_delay_ms);
    read_if(j, "reaction_ms", cfg.pilot.reaction_ms);
    read_if(j, "max_ticks", cfg.max_ticks_per_trial);
    return cfg;
}

ordered_json event_to_json(const TrialEvent& ev) {
    ordered_json j;
    j["tick"] = ev.tick;
    j["shoulder_pos"] = ev.shoulder_pos;
    j["shoulder_vel"] = ev.shoulder_vel;
    j["contact_raw"] = ev.contact_raw;
    j["prediction"] = ev.prediction;
    j["shoulder_bin"] = ev.shoulder_bin;
    j["query_bin"] = ev.query_bin;
    if (ev.token) {
        ordered_json t;
        t["cause"] = cause_name(ev.token->cause);
        t["prediction"] = ev.token->prediction_value;
        t["shoulder_bin"] = ev.token->shoulder_bin;
        j["token"] = std::move(t);
    } else {
        j["token"] = nullptr;
    }
    j["delivered"] = ev.delivered;
    j["cmd"] = ev.cmd;
    j["motion_index"] = ev.motion_index;
    j["phase"] = ev.phase;
    return j;
}

TrialEvent event_from_json(const json& j) {
    TrialEvent ev;
    ev.tick = j.at("tick").get<std::int64_t>();
    ev.shoulder_pos = j.at("shoulder_pos").get<double>();
    ev.shoulder_vel = j.at("shoulder_vel").get<double>();
    ev.contact_raw = j.at("contact_raw").get<double>();
    ev.prediction = j.at("prediction").get<double>();
    ev.shoulder_bin = j.at("shoulder_bin").get<int>();
    ev.query_bin = j.at("query_bin").get<int>();
    if (const auto& t = j.at("token"); !t.is_null()) {
        Token tok;
        tok.tick = ev.tick;
        tok.cause = t.at("cause").get<std::string>() == "contact" ? TokenCause::contact
                                                                 : TokenCause::prediction;
        tok.prediction_value = t.at("prediction").get<double>();
        tok.shoulder_bin = t.at("shoulder_bin").get<int>();
        ev.token = tok;
    }
    ev.delivered = j.at("delivered").get<std::vector<std::int64_t>>();
    ev.cmd = j.at("cmd").get<double>();
    ev.motion_index = j.at("motion_index").get<int>();
    ev.phase = j.at("phase").get<std::string>();
    return ev;
}

ordered_json summary_to_json(const TrialSummary& s) {
    ordered_json j;
    j["trial"] = s.trial;
    j["contacts_total"] = s.contacts_total;
    j["contact_ticks"] = s.contact_ticks;
    j["tokens_total"] = s.tokens_total;
    j["motions"] = s.motions;
    j["duration_ticks"] = s.duration_ticks;
    j["completed"] = s.completed;
    j["weight_checksum"] = s.weight_checksum;
    j["config"] = config_to_json(s.config);
    return j;
}

TrialSummary summary_from_json(const json& j) {
    TrialSummary s;
    s.trial = j.at("trial").get<int>();
    s.contacts_total = j.at("contacts_total").get<int>();
    s.contact_ticks = j.at("contact_ticks").get<int>();
    s.tokens_total = j.at("tokens_total").get<int>();
    s.motions = j.at("motions").get<int>();
    s.duration_ticks = j.at("duration_ticks").get<std::int64_t>();
    s.completed = j.at("completed").get<bool>();
    s.weight_checksum = j.at("weight_checksum").get<std::string>();
    s.config = config_from_json(j.at("config"));
    return s;
}

ordered_json log_to_json(const TrialLog& log) {
    ordered_json j;
    j["events"] = ordered_json::array();
    for (const auto& ev : log.events) j["events"].push_back(event_to_json(ev));
    j["summary"] = summary_to_json(log.summary);
    return j;
}

std::string to_jsonl(const TrialLog& log) {
    std::string out;
    for (const auto& ev : log.events) {
        out += event_to_json(ev).dump();
        out += '\n';
    }
    ordered_json tail;
    tail["summary"] = summary_to_json(log.summary);
    out += tail.dump();
    out += '\n';
    return out;
}

TrialLog parse_jsonl(std::string_view text) {
    TrialLog log;
    bool have_summary = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        if (have_summary) throw std::runtime_error("line " + std::to_string(line_no) + ": data after summary");
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            if (auto it = j.find("summary"); it != j.end()) {
                log.summary = summary_from_json(*it);
                have_summary = true;
            } else {
                log.events.push_back(event_from_json(j));
            }
        } catch (const json::exception& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_summary) throw std::runtime_error("trial log has no summary line");
    return log;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_log(const std::filesystem::path& path, const TrialLog& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_jsonl(log);
}

TrialLog read_log(const std::filesystem::path& path) { return parse_jsonl(read_file(path)); }

std::string log_file_name(int trial) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "trial_%03d.jsonl", trial);
    return buf;
}

}  // namespace pavsig
