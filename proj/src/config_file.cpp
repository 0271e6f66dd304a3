#include "pavsig/config_file.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

#include "pavsig/trial_log.hpp"

namespace pavsig {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view v, std::size_t line) {
    T out{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw std::invalid_argument("line " + std::to_string(line) + ": bad number '" + std::string(v) + "'");
    }
    return out;
}

}  // namespace

void apply_config_text(std::string_view text, ExperimentConfig& cfg) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        auto& servo = cfg.world.servo;
        auto& ws = cfg.world.workspace;
        if (key == "tick_ms") cfg.world.tick_ms = parse_number<double>(value, line_no);
        else if (key == "max_step") servo.max_step = parse_number<double>(value, line_no);
        else if (key == "left_wall") ws.left_wall = parse_number<double>(value, line_no);
        else if (key == "right_wall") ws.right_wall = parse_number<double>(value, line_no);
        else if (key == "walls") {
            const auto comma = value.find(',');
            if (comma == std::string_view::npos) {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": walls = left,right");
            }
            ws.left_wall = parse_number<double>(trim(value.substr(0, comma)), line_no);
            ws.right_wall = parse_number<double>(trim(value.substr(comma + 1)), line_no);
        }
        else if (key == "jitter_bins") servo.jitter_bins = parse_number<int>(value, line_no);
        else if (key == "overshoot_prob") servo.overshoot_prob = parse_number<double>(value, line_no);
        else if (key == "seed") cfg.signalling.seed = parse_number<std::uint64_t>(value, line_no);
        else if (key == "backoff_bins") cfg.pilot.backoff_bins = parse_number<double>(value, line_no);
        else if (key == "motions_per_trial") cfg.signalling.motions_per_trial = parse_number<int>(value, line_no);
        else if (key == "contact_high") ws.contact_high = parse_number<double>(value, line_no);
        else if (key == "contact_detect_threshold") ws.contact_detect_threshold = parse_number<double>(value, line_no);
        else if (key == "latency_ticks") servo.latency_ticks = parse_number<int>(value, line_no);
        else if (key == "bins") cfg.world.bins = parse_number<int>(value, line_no);
        else {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown key '" +
                                        std::string(key) + "'");
        }
    }
}

void apply_config_file(const std::filesystem::path& path, ExperimentConfig& cfg) {
    apply_config_text(read_file(path), cfg);
}

}  // namespace pavsig
