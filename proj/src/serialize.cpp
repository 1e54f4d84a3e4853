#include "a51/serialize.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "a51/codec.hpp"

namespace a51 {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json match_object(const CompleteStateCandidate& m) {
  ordered_json j;
  j["r1"] = hex_word(m.state.r1);
  j["r2"] = hex_word(m.state.r2);
  j["r3"] = hex_word(m.state.r3);
  j["rounds"] = m.rounds;
  return j;
}

Word register_field(const json& j, const char* key) {
  const std::uint64_t v = parse_hex(j.at(key).get<std::string>());
  if (v > 0xffffffffull) throw std::invalid_argument(std::string(key) + " wider than 32 bits");
  return static_cast<Word>(v);
}

CompleteStateCandidate match_from(const json& j) {
  return {CipherState{register_field(j, "r1"), register_field(j, "r2"), register_field(j, "r3")},
          j.at("rounds").get<unsigned>()};
}

ordered_json report_object(const AttackReport& r) {
  ordered_json j;
  j["guesses"] = r.guesses;
  j["candidates_emitted"] = r.candidates_emitted;
  j["leaves_pruned"] = r.leaves_pruned;
  j["exhausted_paths"] = r.exhausted_paths;
  j["soundness_violations"] = r.soundness_violations;
  j["peak_live_candidates"] = r.peak_live_candidates;
  j["max_depth"] = r.max_depth;
  j["min_emitted_rounds"] = r.min_emitted_rounds;
  j["matches"] = ordered_json::array();
  for (const auto& m : r.matches) j["matches"].push_back(match_object(m));
  return j;
}

AttackReport report_from(const json& j) {
  AttackReport r;
  r.guesses = j.at("guesses").get<std::uint64_t>();
  r.candidates_emitted = j.at("candidates_emitted").get<std::uint64_t>();
  r.leaves_pruned = j.at("leaves_pruned").get<std::uint64_t>();
  r.exhausted_paths = j.at("exhausted_paths").get<std::uint64_t>();
  r.soundness_violations = j.at("soundness_violations").get<std::uint64_t>();
  r.peak_live_candidates = j.at("peak_live_candidates").get<std::uint64_t>();
  r.max_depth = j.at("max_depth").get<unsigned>();
  r.min_emitted_rounds = j.at("min_emitted_rounds").get<unsigned>();
  for (const auto& m : j.at("matches")) r.matches.push_back(match_from(m));
  std::sort(r.matches.begin(), r.matches.end());
  return r;
}

template <class F>
auto parsing(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed ") + what + ": " + e.what());
  }
}

std::string format_ratio(double r) {
  std::ostringstream os;
  os << std::setprecision(6) << r;
  return os.str();
}

}  // namespace

std::string match_json_line(const CompleteStateCandidate& m) { return match_object(m).dump(); }

CompleteStateCandidate parse_match_json_line(const std::string& line) {
  return parsing("match line", [&] { return match_from(json::parse(line)); });
}

std::string report_json(const AttackReport& r) { return report_object(r).dump(); }

AttackReport parse_report_json(const std::string& text) {
  return parsing("report", [&] { return report_from(json::parse(text)); });
}

std::string growth_csv(const GrowthStats& s) {
  std::string out = "round,total,complete,ratio\n";
  for (const GrowthRow& r : s.rows)
    out += std::to_string(r.round) + "," + std::to_string(r.total) + "," +
           std::to_string(r.complete) + "," + format_ratio(r.ratio) + "\n";
  return out;
}

std::string growth_json(const GrowthStats& s) {
  ordered_json rows = ordered_json::array();
  for (const GrowthRow& r : s.rows) {
    ordered_json j;
    j["round"] = r.round;
    j["total"] = r.total;
    j["complete"] = r.complete;
    j["ratio"] = r.ratio;
    rows.push_back(j);
  }
  ordered_json j;
  j["rows"] = rows;
  return j.dump();
}

std::string spec_json(const CipherSpec& spec) {
  ordered_json j;
  j["lengths"] = ordered_json::array();
  j["taps"] = ordered_json::array();
  j["clock_bits"] = ordered_json::array();
  for (const RegisterSpec& r : spec.registers()) {
    j["lengths"].push_back(r.length);
    j["taps"].push_back(r.taps);
    j["clock_bits"].push_back(r.clock_bit);
  }
  return j.dump();
}

CipherSpec parse_spec_json(const std::string& text) {
  return parsing("spec", [&] {
    const json j = json::parse(text);
    const auto lengths = j.at("lengths").get<std::vector<unsigned>>();
    const auto taps = j.at("taps").get<std::vector<std::vector<unsigned>>>();
    const auto clocks = j.at("clock_bits").get<std::vector<unsigned>>();
    if (lengths.size() != 3 || taps.size() != 3 || clocks.size() != 3)
      throw std::invalid_argument("spec needs exactly three registers");
    return CipherSpec({RegisterSpec{lengths[0], taps[0], clocks[0]},
                       RegisterSpec{lengths[1], taps[1], clocks[1]},
                       RegisterSpec{lengths[2], taps[2], clocks[2]}});
  });
}

std::string checkpoint_json(const Checkpoint& cp) {
  ordered_json j;
  j["range"] = {cp.range.first, cp.range.last};
  j["next"] = cp.next;
  j["keystream"] = cp.keystream_hex;
  j["report"] = report_object(cp.report);
  return j.dump();
}

Checkpoint parse_checkpoint_json(const std::string& text) {
  return parsing("checkpoint", [&] {
    const json j = json::parse(text);
    Checkpoint cp;
    const auto range = j.at("range").get<std::vector<std::uint64_t>>();
    if (range.size() != 2 || range[0] > range[1] || range[1] > 0xffffffffull)
      throw std::invalid_argument("checkpoint range is malformed");
    cp.range = {static_cast<Word>(range[0]), static_cast<Word>(range[1])};
    cp.next = j.at("next").get<std::uint64_t>();
    cp.keystream_hex = j.at("keystream").get<std::string>();
    cp.report = report_from(j.at("report"));
    return cp;
  });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot replace " + path + ": " + ec.message());
}

}  // namespace a51
