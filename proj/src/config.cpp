#include "zcsk/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "zcsk/errors.hpp"
#include "zcsk/fmt.hpp"

namespace zcsk {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            int line, const std::string& why) {
  std::ostringstream msg;
  msg << "config line " << line << ": key '" << key << "' has invalid value '"
      << value << "' (" << why << ")";
  throw config_error(msg.str());
}

double parse_double(std::string_view key, std::string_view value, int line) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    bad_value(key, value, line, "expected a number");
  }
  return out;
}

std::int64_t parse_int(std::string_view key, std::string_view value,
                       int line) {
  std::int64_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    bad_value(key, value, line, "expected an integer");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value,
                        int line) {
  std::uint64_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    bad_value(key, value, line, "expected an unsigned integer");
  }
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string_view line(raw_line);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      std::ostringstream msg;
      msg << "config line " << line_no << ": expected 'key = value', got '"
          << line << "'";
      throw config_error(msg.str());
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      std::ostringstream msg;
      msg << "config line " << line_no << ": empty key or value";
      throw config_error(msg.str());
    }
    if (!seen.insert(key).second) {
      std::ostringstream msg;
      msg << "config line " << line_no << ": duplicate key '" << key << "'";
      throw config_error(msg.str());
    }

    if (key == "n") {
      config.n = static_cast<int>(parse_int(key, value, line_no));
    } else if (key == "distance") {
      config.distance = parse_double(key, value, line_no);
    } else if (key == "diffusion_coefficient") {
      if (value == "calibrate") {
        config.calibrate_d = true;
      } else {
        config.calibrate_d = false;
        config.diffusion_coefficient = parse_double(key, value, line_no);
      }
    } else if (key == "calibrate_target") {
      config.calibrate_target = parse_double(key, value, line_no);
    } else if (key == "slot_duration") {
      config.slot_duration = parse_double(key, value, line_no);
    } else if (key == "inhibition_efficiency") {
      config.inhibition_efficiency = parse_double(key, value, line_no);
    } else if (key == "prior_one") {
      config.prior_one = parse_double(key, value, line_no);
    } else if (key == "num_slots") {
      config.num_slots = static_cast<int>(parse_int(key, value, line_no));
    } else if (key == "master_seed") {
      config.master_seed = parse_u64(key, value, line_no);
    } else if (key == "isi_memory_slots") {
      config.isi_memory_slots =
          static_cast<int>(parse_int(key, value, line_no));
    } else if (key == "inhibitor_policy") {
      if (value == "every-slot") {
        config.inhibitor_policy = InhibitorPolicy::every_slot;
      } else if (value == "only-on-emission") {
        config.inhibitor_policy = InhibitorPolicy::on_emission;
      } else {
        bad_value(key, value, line_no,
                  "expected every-slot or only-on-emission");
      }
    } else if (key == "scheme") {
      if (value == "csk") {
        config.scheme = Scheme::csk;
      } else if (value == "zebra-csk") {
        config.scheme = Scheme::zebra;
      } else {
        bad_value(key, value, line_no, "expected csk or zebra-csk");
      }
    } else if (key == "counting") {
      if (value == "total") {
        config.counting = CountingMode::total;
      } else if (value == "typed") {
        config.counting = CountingMode::typed;
      } else {
        bad_value(key, value, line_no, "expected total or typed");
      }
    } else {
      std::ostringstream msg;
      msg << "config line " << line_no << ": unknown key '" << key << "'";
      throw config_error(msg.str());
    }
  }
  validate(config);
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw io_error("error reading config file: " + path);
  try {
    return parse_config_text(buffer.str());
  } catch (const config_error& e) {
    throw config_error(path + ": " + e.what());
  }
}

std::string to_config_text(const RunConfig& config) {
  std::ostringstream out;
  out << "n = " << config.n << '\n';
  out << "distance = " << format_double(config.distance) << '\n';
  if (config.calibrate_d) {
    out << "diffusion_coefficient = calibrate\n";
  } else {
    out << "diffusion_coefficient = "
        << format_double(config.diffusion_coefficient) << '\n';
  }
  out << "calibrate_target = " << format_double(config.calibrate_target)
      << '\n';
  out << "slot_duration = " << format_double(config.slot_duration) << '\n';
  out << "inhibition_efficiency = "
      << format_double(config.inhibition_efficiency) << '\n';
  out << "prior_one = " << format_double(config.prior_one) << '\n';
  out << "num_slots = " << config.num_slots << '\n';
  out << "master_seed = " << config.master_seed << '\n';
  out << "isi_memory_slots = " << config.isi_memory_slots << '\n';
  out << "inhibitor_policy = "
      << (config.inhibitor_policy == InhibitorPolicy::every_slot
              ? "every-slot"
              : "only-on-emission")
      << '\n';
  out << "scheme = " << (config.scheme == Scheme::csk ? "csk" : "zebra-csk")
      << '\n';
  out << "counting = "
      << (config.counting == CountingMode::total ? "total" : "typed") << '\n';
  return out.str();
}

void validate(const RunConfig& config) {
  const auto fail = [](const std::string& what) {
    throw config_error("invalid config: " + what);
  };
  if (config.n < 1) fail("n must be >= 1");
  if (!(config.distance > 0.0) || !std::isfinite(config.distance)) {
    fail("distance must be positive");
  }
  if (!config.calibrate_d &&
      (!(config.diffusion_coefficient > 0.0) ||
       !std::isfinite(config.diffusion_coefficient))) {
    fail("diffusion_coefficient must be positive (or 'calibrate')");
  }
  if (!(config.calibrate_target > 0.0 && config.calibrate_target < 0.5)) {
    fail("calibrate_target must be in (0, 0.5)");
  }
  if (!(config.slot_duration > 0.0) || !std::isfinite(config.slot_duration)) {
    fail("slot_duration must be positive");
  }
  if (!(config.inhibition_efficiency >= 0.0 &&
        config.inhibition_efficiency <= 1.0)) {
    fail("inhibition_efficiency must be in [0, 1]");
  }
  if (!(config.prior_one > 0.0 && config.prior_one < 1.0)) {
    fail("prior_one must be in (0, 1)");
  }
  if (config.num_slots < 2) fail("num_slots must be >= 2");
  if (config.isi_memory_slots < 1) fail("isi_memory_slots must be >= 1");
  if (config.isi_memory_slots >= config.num_slots) {
    fail("num_slots must exceed isi_memory_slots");
  }
}

}  // namespace zcsk
