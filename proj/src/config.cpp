#include "fsonoma/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fsonoma {

using json = nlohmann::json;

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

std::vector<std::vector<double>> ExperimentConfig::rate_sets() const {
  if (!target_rate_sets.empty()) return target_rate_sets;
  std::vector<double> own;
  for (const auto& u : users) own.push_back(u.target_rate);
  return {own};
}

namespace {

// Character iterator that reports the last position the parser read.
struct TrackingIterator {
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  const char** sink = nullptr;

  reference operator*() const {
    *sink = p;
    return *p;
  }
  TrackingIterator& operator++() {
    ++p;
    return *this;
  }
  TrackingIterator operator++(int) {
    auto old = *this;
    ++p;
    return old;
  }
  bool operator==(const TrackingIterator& o) const { return p == o.p; }
};

// Builds the document and records the source line of every value, keyed
// by JSON pointer.
class LineRecorder {
 public:
  using number_integer_t = json::number_integer_t;
  using number_unsigned_t = json::number_unsigned_t;
  using number_float_t = json::number_float_t;
  using string_t = json::string_t;
  using binary_t = json::binary_t;

  LineRecorder(std::string_view text, json& out) : text_(text), dom_(out, true) {
    cursor_ = text_.data();
    scanned_ = text_.data();
  }

  const char** sink() { return &cursor_; }
  std::map<std::string, int> take_lines() { return std::move(lines_); }

  bool null() { return scalar(dom_.null()); }
  bool boolean(bool v) { return scalar(dom_.boolean(v)); }
  bool number_integer(number_integer_t v) { return scalar(dom_.number_integer(v)); }
  bool number_unsigned(number_unsigned_t v) { return scalar(dom_.number_unsigned(v)); }
  bool number_float(number_float_t v, const string_t& s) {
    return scalar(dom_.number_float(v, s));
  }
  bool string(string_t& v) { return scalar(dom_.string(v)); }
  bool binary(binary_t& v) { return scalar(dom_.binary(v)); }

  bool start_object(std::size_t n) {
    record();
    stack_.push_back({false, 0, {}});
    return dom_.start_object(n);
  }
  bool key(string_t& k) {
    stack_.back().key = k;
    return dom_.key(k);
  }
  bool end_object() {
    close();
    return dom_.end_object();
  }
  bool start_array(std::size_t n) {
    record();
    stack_.push_back({true, 0, {}});
    return dom_.start_array(n);
  }
  bool end_array() {
    close();
    return dom_.end_array();
  }
  template <class Exception>
  bool parse_error(std::size_t pos, const std::string& token, const Exception& ex) {
    return dom_.parse_error(pos, token, ex);
  }

 private:
  struct Frame {
    bool array;
    std::size_t index;
    std::string key;
  };

  int line() {
    const char* stop = std::min(cursor_, text_.data() + text_.size());
    line_ += static_cast<int>(std::count(scanned_, stop, '\n'));
    scanned_ = std::max(scanned_, stop);
    return line_;
  }

  std::string pointer() const {
    std::string p;
    for (const auto& f : stack_) {
      p += '/';
      if (f.array) {
        p += std::to_string(f.index);
      } else {
        for (char c : f.key) {
          if (c == '~') p += "~0";
          else if (c == '/') p += "~1";
          else p += c;
        }
      }
    }
    return p;
  }

  void record() { lines_.emplace(pointer(), line()); }

  bool scalar(bool ok) {
    record();
    advance();
    return ok;
  }

  void close() {
    stack_.pop_back();
    advance();
  }

  void advance() {
    if (!stack_.empty() && stack_.back().array) ++stack_.back().index;
  }

  std::string_view text_;
  nlohmann::detail::json_sax_dom_parser<json> dom_;
  const char* cursor_;
  const char* scanned_;
  int line_ = 1;
  std::vector<Frame> stack_;
  std::map<std::string, int> lines_;
};

// Typed access to the parsed document with line-numbered failures.
class Reader {
 public:
  Reader(std::string source, std::map<std::string, int> lines)
      : source_(std::move(source)), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& message) const {
    throw ConfigError(source_, line_of(ptr), message);
  }

  int line_of(std::string ptr) const {
    for (;;) {
      const auto it = lines_.find(ptr);
      if (it != lines_.end()) return it->second;
      if (ptr.empty()) return 1;
      ptr.erase(ptr.rfind('/'));
    }
  }

  static std::string label(const std::string& ptr) { return ptr.empty() ? "document" : ptr; }

  void expect_object(const json& j, const std::string& ptr,
                     std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail(ptr, label(ptr) + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
      if (!ok.count(k)) fail(ptr + "/" + k, "unknown key '" + k + "' in " + label(ptr));
    }
  }

  double number(const json& j, const std::string& ptr) const {
    if (!j.is_number()) fail(ptr, label(ptr) + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ptr, label(ptr) + " must be finite");
    return v;
  }

  double positive(const json& j, const std::string& ptr) const {
    const double v = number(j, ptr);
    if (!(v > 0.0)) fail(ptr, label(ptr) + " must be positive");
    return v;
  }

  double nonnegative(const json& j, const std::string& ptr) const {
    const double v = number(j, ptr);
    if (!(v >= 0.0)) fail(ptr, label(ptr) + " must be nonnegative");
    return v;
  }

  std::int64_t integer(const json& j, const std::string& ptr, std::int64_t min) const {
    if (!j.is_number_integer()) fail(ptr, label(ptr) + " must be an integer");
    const auto v = j.get<std::int64_t>();
    if (v < min) fail(ptr, label(ptr) + " must be at least " + std::to_string(min));
    return v;
  }

  std::string string(const json& j, const std::string& ptr) const {
    if (!j.is_string()) fail(ptr, label(ptr) + " must be a string");
    return j.get<std::string>();
  }

  const json& array(const json& j, const std::string& ptr) const {
    if (!j.is_array()) fail(ptr, label(ptr) + " must be an array");
    if (j.empty()) fail(ptr, label(ptr) + " must not be empty");
    return j;
  }

  std::vector<double> numbers(const json& j, const std::string& ptr, bool positive_only) const {
    std::vector<double> out;
    const json& arr = array(j, ptr);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = ptr + "/" + std::to_string(i);
      out.push_back(positive_only ? positive(arr[i], p) : nonnegative(arr[i], p));
    }
    return out;
  }

 private:
  std::string source_;
  std::map<std::string, int> lines_;
};

std::vector<double> parse_rho(const Reader& r, const json& j, const std::string& ptr) {
  std::vector<double> rho;
  if (j.is_array()) {
    if (j.empty()) r.fail(ptr, "rho_dB sweep is empty");
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string p = ptr + "/" + std::to_string(i);
      rho.push_back(r.number(j[i], p));
      if (i > 0 && !(rho[i] > rho[i - 1])) r.fail(p, "rho_dB values must be strictly increasing");
    }
    return rho;
  }
  r.expect_object(j, ptr, {"start", "stop", "step"});
  for (const char* k : {"start", "stop", "step"}) {
    if (!j.contains(k)) r.fail(ptr, std::string("rho_dB sweep needs '") + k + "'");
  }
  const double start = r.number(j["start"], ptr + "/start");
  const double stop = r.number(j["stop"], ptr + "/stop");
  const double step = r.positive(j["step"], ptr + "/step");
  if (stop < start) r.fail(ptr, "rho_dB sweep is empty (stop < start)");
  const double count = std::floor((stop - start) / step + 1e-9);
  if (count > 1e5) r.fail(ptr, "rho_dB sweep has too many points");
  for (int i = 0; i <= static_cast<int>(count); ++i) rho.push_back(start + i * step);
  return rho;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  json doc;
  LineRecorder recorder(text, doc);
  const TrackingIterator first{text.data(), recorder.sink()};
  const TrackingIterator last{text.data() + text.size(), recorder.sink()};
  try {
    json::sax_parse(first, last, &recorder);
  } catch (const json::parse_error& e) {
    // nlohmann reports "... at line L, column C: ..."
    int line = 1;
    const std::string what = e.what();
    const auto at = what.find("line ");
    if (at != std::string::npos) line = std::atoi(what.c_str() + at + 5);
    const auto colon = what.find(": ", what.find("column"));
    throw ConfigError(source, line,
                      "invalid JSON: " + (colon == std::string::npos ? what : what.substr(colon + 2)));
  }
  const Reader r(source, recorder.take_lines());

  r.expect_object(doc, "",
                  {"$schema", "scenario", "description", "atmosphere", "rytov_variance", "users",
                   "target_rate_sets", "zeta_dB", "rho_dB", "schemes", "monte_carlo",
                   "constants", "p_aim", "output"});
  for (const char* k : {"scenario", "rytov_variance", "users", "zeta_dB", "rho_dB"}) {
    if (!doc.contains(k)) r.fail("", std::string("missing required key '") + k + "'");
  }

  ExperimentConfig cfg;
  cfg.scenario = r.string(doc["scenario"], "/scenario");
  if (doc.contains("description")) cfg.description = r.string(doc["description"], "/description");

  if (doc.contains("atmosphere")) {
    const json& a = doc["atmosphere"];
    r.expect_object(a, "/atmosphere", {"visibility_km", "wavelength_nm"});
    if (a.contains("visibility_km"))
      cfg.atmosphere.visibility_km = r.positive(a["visibility_km"], "/atmosphere/visibility_km");
    if (a.contains("wavelength_nm"))
      cfg.atmosphere.wavelength_nm = r.positive(a["wavelength_nm"], "/atmosphere/wavelength_nm");
    try {
      attenuation_coefficient(cfg.atmosphere);
    } catch (const std::exception& e) {
      r.fail("/atmosphere", e.what());
    }
  }

  cfg.rytov_variances = r.numbers(doc["rytov_variance"], "/rytov_variance", true);

  const json& users = r.array(doc["users"], "/users");
  for (std::size_t i = 0; i < users.size(); ++i) {
    const std::string p = "/users/" + std::to_string(i);
    r.expect_object(users[i], p, {"distance_km", "target_rate", "mu"});
    UserLink u;
    if (!users[i].contains("distance_km")) r.fail(p, "user needs 'distance_km'");
    u.distance_km = r.positive(users[i]["distance_km"], p + "/distance_km");
    if (users[i].contains("target_rate"))
      u.target_rate = r.nonnegative(users[i]["target_rate"], p + "/target_rate");
    if (users[i].contains("mu")) {
      u.mu = r.nonnegative(users[i]["mu"], p + "/mu");
      if (u.mu > 0.5) r.fail(p + "/mu", "mu must lie in [0, 0.5]");
    }
    cfg.users.push_back(u);
  }

  if (doc.contains("target_rate_sets")) {
    const json& sets = r.array(doc["target_rate_sets"], "/target_rate_sets");
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const std::string p = "/target_rate_sets/" + std::to_string(i);
      auto rates = r.numbers(sets[i], p, false);
      if (rates.size() != cfg.users.size())
        r.fail(p, "target rate set needs one rate per user (" +
                      std::to_string(cfg.users.size()) + ")");
      cfg.target_rate_sets.push_back(std::move(rates));
    }
  }

  cfg.zeta_db = r.numbers(doc["zeta_dB"], "/zeta_dB", false);
  cfg.rho_db = parse_rho(r, doc["rho_dB"], "/rho_dB");

  if (doc.contains("schemes")) {
    const json& s = r.array(doc["schemes"], "/schemes");
    cfg.schemes.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string p = "/schemes/" + std::to_string(i);
      const std::string name = r.string(s[i], p);
      SchemeKind kind;
      if (name == "noma") kind = SchemeKind::Noma;
      else if (name == "oma") kind = SchemeKind::Oma;
      else r.fail(p, "unknown scheme '" + name + "' (expected noma or oma)");
      if (std::find(cfg.schemes.begin(), cfg.schemes.end(), kind) != cfg.schemes.end())
        r.fail(p, "scheme '" + name + "' listed twice");
      cfg.schemes.push_back(kind);
    }
  }

  if (doc.contains("monte_carlo")) {
    const json& m = doc["monte_carlo"];
    r.expect_object(m, "/monte_carlo", {"trials", "seed", "chunk_size"});
    if (m.contains("trials")) {
      cfg.monte_carlo.trials = r.integer(m["trials"], "/monte_carlo/trials", 0);
      if (cfg.monte_carlo.trials > 0 && cfg.monte_carlo.trials < 1000)
        r.fail("/monte_carlo/trials", "trials must be 0 (disabled) or at least 1000");
    }
    if (m.contains("seed")) {
      if (!m["seed"].is_number_unsigned()) r.fail("/monte_carlo/seed", "seed must be a nonnegative integer");
      cfg.monte_carlo.seed = m["seed"].get<std::uint64_t>();
    }
    if (m.contains("chunk_size"))
      cfg.monte_carlo.chunk_size = r.integer(m["chunk_size"], "/monte_carlo/chunk_size", 1);
  }

  if (doc.contains("constants")) {
    const json& c = doc["constants"];
    r.expect_object(c, "/constants", {"eps_phi", "eps_mu", "log_base"});
    if (c.contains("eps_phi")) cfg.constants.eps_phi = r.nonnegative(c["eps_phi"], "/constants/eps_phi");
    if (c.contains("eps_mu")) cfg.constants.eps_mu = r.nonnegative(c["eps_mu"], "/constants/eps_mu");
    if (c.contains("log_base")) {
      const std::string b = r.string(c["log_base"], "/constants/log_base");
      if (b == "e") cfg.constants.log_base = LogBase::Natural;
      else if (b == "2") cfg.constants.log_base = LogBase::Binary;
      else r.fail("/constants/log_base", "log_base must be \"e\" or \"2\"");
    }
  }

  if (doc.contains("p_aim")) cfg.p_aim = r.positive(doc["p_aim"], "/p_aim");
  if (doc.contains("output")) cfg.output = r.string(doc["output"], "/output");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

}  // namespace fsonoma
