#include "flocksim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace flocksim {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const std::string v = trim(value);
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: bad number for '" + key + "': " + value);
  return out;
}

long long to_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const std::string v = trim(value);
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: bad integer for '" + key + "': " + value);
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad boolean for '" + key + "': " + value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  config.seeds.clear();
  LlmConfig llm;
  bool llm_section_seen = false;

  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      if (section != "task" && section != "run" && section != "llm")
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unknown section [" + section + "]");
      if (section == "llm") llm_section_seen = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (section == "task") {
      if (key == "shape") {
        const auto s = parse_shape(value);
        if (!s) throw ConfigError("config: unknown shape: " + value);
        config.task.shape = *s;
      } else if (key == "robots") {
        config.task.team_size = static_cast<int>(to_int(key, value));
      } else if (key == "center_x") {
        config.task.center.x = to_double(key, value);
      } else if (key == "center_y") {
        config.task.center.y = to_double(key, value);
      } else if (key == "desired_distance") {
        config.task.desired_distance = to_double(key, value);
      } else if (key == "safe_distance") {
        config.task.safe_distance = to_double(key, value);
      } else if (key == "max_speed") {
        config.task.max_speed = to_double(key, value);
      } else if (key == "comm_range") {
        config.task.comm_range = to_double(key, value);
      } else if (key == "arena_min_x") {
        config.task.arena.min.x = to_double(key, value);
      } else if (key == "arena_min_y") {
        config.task.arena.min.y = to_double(key, value);
      } else if (key == "arena_max_x") {
        config.task.arena.max.x = to_double(key, value);
      } else if (key == "arena_max_y") {
        config.task.arena.max.y = to_double(key, value);
      } else {
        throw ConfigError("config: unknown [task] key: " + key);
      }
    } else if (section == "run") {
      if (key == "planner") {
        const auto k = parse_planner_kind(value);
        if (!k) throw ConfigError("config: unknown planner: " + value);
        config.planner = *k;
      } else if (key == "planner_overrides") {
        for (const std::string& entry : split_list(value)) {
          const auto colon = entry.find(':');
          if (colon == std::string::npos)
            throw ConfigError("config: planner_overrides entries are id:kind, got: " +
                              entry);
          const int id = static_cast<int>(to_int(key, entry.substr(0, colon)));
          const auto k = parse_planner_kind(trim(entry.substr(colon + 1)));
          if (!k) throw ConfigError("config: unknown planner in override: " + entry);
          config.planner_overrides[id] = *k;
        }
      } else if (key == "consensus") {
        config.consensus_enabled = to_bool(key, value);
      } else if (key == "tie_rule") {
        const auto t = parse_tie_rule(value);
        if (!t) throw ConfigError("config: unknown tie_rule: " + value);
        config.tie_rule = *t;
      } else if (key == "goal_cohort") {
        const auto c = parse_goal_cohort(value);
        if (!c) throw ConfigError("config: unknown goal_cohort: " + value);
        config.goal_cohort = *c;
      } else if (key == "conflicting_plans") {
        config.conflicting_plans = to_bool(key, value);
      } else if (key == "max_rounds") {
        config.max_rounds = static_cast<int>(to_int(key, value));
      } else if (key == "seeds") {
        for (const std::string& s : split_list(value))
          config.seeds.push_back(static_cast<std::uint64_t>(to_int(key, s)));
      } else if (key == "epsilon") {
        config.epsilon = to_double(key, value);
      } else if (key == "window") {
        config.window = static_cast<int>(to_int(key, value));
      } else if (key == "correspondence") {
        const auto c = parse_correspondence(value);
        if (!c) throw ConfigError("config: unknown correspondence: " + value);
        config.correspondence = *c;
      } else if (key == "svg") {
        config.export_svg = to_bool(key, value);
      } else {
        throw ConfigError("config: unknown [run] key: " + key);
      }
    } else if (section == "llm") {
      if (key == "base_url") {
        llm.base_url = value;
      } else if (key == "model") {
        llm.model = value;
      } else if (key == "temperature") {
        llm.temperature = to_double(key, value);
      } else if (key == "timeout_seconds") {
        llm.timeout_seconds = static_cast<int>(to_int(key, value));
      } else if (key == "api_key_env") {
        llm.api_key_env = value;
      } else if (key == "transport_retries") {
        llm.transport_retries = static_cast<int>(to_int(key, value));
      } else {
        throw ConfigError("config: unknown [llm] key: " + key);
      }
    } else {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": key outside any section: " + key);
    }
  }

  if (config.seeds.empty()) config.seeds.push_back(1);
  if (llm_section_seen) config.llm = llm;
  return config;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  out << "[task]\n";
  out << "shape = " << shape_name(config.task.shape) << "\n";
  out << "robots = " << config.task.team_size << "\n";
  out << "center_x = " << format_double(config.task.center.x) << "\n";
  out << "center_y = " << format_double(config.task.center.y) << "\n";
  out << "desired_distance = " << format_double(config.task.desired_distance) << "\n";
  out << "safe_distance = " << format_double(config.task.safe_distance) << "\n";
  out << "max_speed = " << format_double(config.task.max_speed) << "\n";
  out << "comm_range = " << format_double(config.task.comm_range) << "\n";
  out << "arena_min_x = " << format_double(config.task.arena.min.x) << "\n";
  out << "arena_min_y = " << format_double(config.task.arena.min.y) << "\n";
  out << "arena_max_x = " << format_double(config.task.arena.max.x) << "\n";
  out << "arena_max_y = " << format_double(config.task.arena.max.y) << "\n";
  out << "\n[run]\n";
  out << "planner = " << planner_kind_name(config.planner) << "\n";
  out << "planner_overrides = ";
  bool first = true;
  for (const auto& [id, kind] : config.planner_overrides) {
    if (!first) out << ", ";
    out << id << ":" << planner_kind_name(kind);
    first = false;
  }
  out << "\n";
  out << "consensus = " << (config.consensus_enabled ? "true" : "false") << "\n";
  out << "tie_rule = " << tie_rule_name(config.tie_rule) << "\n";
  out << "goal_cohort = " << goal_cohort_name(config.goal_cohort) << "\n";
  out << "conflicting_plans = " << (config.conflicting_plans ? "true" : "false") << "\n";
  out << "max_rounds = " << config.max_rounds << "\n";
  out << "seeds = ";
  for (std::size_t i = 0; i < config.seeds.size(); ++i) {
    if (i) out << ", ";
    out << config.seeds[i];
  }
  out << "\n";
  out << "epsilon = " << format_double(config.epsilon) << "\n";
  out << "window = " << config.window << "\n";
  out << "correspondence = " << correspondence_name(config.correspondence) << "\n";
  out << "svg = " << (config.export_svg ? "true" : "false") << "\n";
  if (config.llm) {
    out << "\n[llm]\n";
    out << "base_url = " << config.llm->base_url << "\n";
    out << "model = " << config.llm->model << "\n";
    out << "temperature = " << format_double(config.llm->temperature) << "\n";
    out << "timeout_seconds = " << config.llm->timeout_seconds << "\n";
    out << "api_key_env = " << config.llm->api_key_env << "\n";
    out << "transport_retries = " << config.llm->transport_retries << "\n";
  }
  return out.str();
}

}  // namespace flocksim
