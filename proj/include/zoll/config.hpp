#pragma once

// Declarative experiment configuration.  Two accepted formats:
//   - flat key-value text:  "key = value" per line, '#' comments;
//   - JSON, flattened with dotted keys (arrays become space-separated).
// Values stay strings until a typed getter parses them; validation errors
// name the offending field.  A FNV-1a digest of the canonicalized mapping
// ties every CSV artifact back to its configuration.

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "zoll/geometry.hpp"
#include "zoll/potential.hpp"

namespace zoll {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text) {
    std::string t = text;
    std::size_t i = t.find_first_not_of(" \t\r\n");
    if (i != std::string::npos && (t[i] == '{' || t[i] == '[')) return parse_json(t);
    return parse_flat(t);
  }

  static ExperimentConfig parse_flat(const std::string& text) {
    ExperimentConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(trimmed.substr(0, eq));
      std::string val = trim(trimmed.substr(eq + 1));
      if (key.empty()) throw config_error("config line " + std::to_string(lineno) + ": empty key");
      c.kv_[key] = val;
    }
    return c;
  }

  static ExperimentConfig parse_json(const std::string& text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
      throw config_error(std::string("config JSON: ") + e.what());
    }
    ExperimentConfig c;
    flatten(j, "", c.kv_);
    return c;
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }
  std::string require_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw config_error("config field missing: " + key);
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_double(key, it->second);
  }
  long long get_int(const std::string& key, long long fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
      std::size_t pos = 0;
      long long v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw config_error("config field " + key + ": not an integer: " + it->second);
    }
  }
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback = {}) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string tok;
    while (in >> tok) {
      if (tok == ";" || tok == ",") continue;
      out.push_back(parse_double(key, tok));
    }
    return out;
  }
  std::vector<long long> get_ints(const std::string& key,
                                  const std::vector<long long>& fallback = {}) const {
    std::vector<long long> out;
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::istringstream in(it->second);
    std::string tok;
    while (in >> tok) {
      try {
        out.push_back(std::stoll(tok));
      } catch (...) {
        throw config_error("config field " + key + ": not an integer list");
      }
    }
    return out;
  }

  void set(const std::string& key, const std::string& val) { kv_[key] = val; }

  // Surface record {kind, sigma}; defaults to the canonical sphere.
  ZollSurface surface() const {
    std::string kind = get_string("surface.kind", "canonical");
    if (kind == "canonical") return ZollSurface::canonical_sphere();
    if (kind == "tannery") {
      std::vector<double> sig = get_doubles("surface.sigma");
      if (sig.empty()) throw config_error("config field surface.sigma: required for tannery");
      try {
        return ZollSurface::tannery(RevolutionProfile::odd(sig));
      } catch (const std::exception& e) {
        throw config_error(std::string("config field surface.sigma: ") + e.what());
      }
    }
    throw config_error("config field surface.kind: expected canonical or tannery");
  }

  // Potential record; terms are "i j k coeff" groups separated by ';'.
  Potential potential() const {
    std::string kind = get_string("potential.kind", "ambient");
    if (kind == "ambient") {
      std::vector<double> raw = get_doubles("potential.terms", {0, 0, 2, 1.0});
      if (raw.size() % 4 != 0)
        throw config_error("config field potential.terms: groups of 'i j k coeff'");
      std::vector<MonomialTerm> terms;
      for (std::size_t n = 0; n < raw.size(); n += 4) {
        MonomialTerm t;
        t.i = static_cast<int>(raw[n]);
        t.j = static_cast<int>(raw[n + 1]);
        t.k = static_cast<int>(raw[n + 2]);
        t.coeff = raw[n + 3];
        terms.push_back(t);
      }
      return Potential::ambient(std::move(terms));
    }
    if (kind == "harmonic") {
      int lmax = static_cast<int>(get_int("potential.lmax", -1));
      if (lmax < 0) throw config_error("config field potential.lmax: required for harmonic");
      // groups "l m re im" with m >= 0; negative m filled by reality.
      std::vector<double> raw = get_doubles("potential.coeffs");
      if (raw.size() % 4 != 0)
        throw config_error("config field potential.coeffs: groups of 'l m re im'");
      std::vector<std::complex<double>> coeffs((lmax + 1) * (lmax + 1));
      for (std::size_t n = 0; n < raw.size(); n += 4) {
        int l = static_cast<int>(raw[n]);
        int m = static_cast<int>(raw[n + 1]);
        if (l < 0 || l > lmax || m < 0 || m > l)
          throw config_error("config field potential.coeffs: need 0 <= m <= l <= lmax");
        std::complex<double> z{raw[n + 2], raw[n + 3]};
        if (m == 0 && std::abs(z.imag()) > 1e-12)
          throw config_error("config field potential.coeffs: m = 0 coefficients must be real");
        coeffs[l * l + l + m] = z;
        double sign = (m % 2 == 0) ? 1.0 : -1.0;
        coeffs[l * l + l - m] = sign * std::conj(z);
      }
      return Potential::harmonic(lmax, std::move(coeffs));
    }
    throw config_error("config field potential.kind: expected ambient or harmonic");
  }

  std::uint64_t seed() const { return static_cast<std::uint64_t>(get_int("seed", 0)); }

  // FNV-1a over the canonical "key=value\n" listing (std::map iterates sorted).
  std::uint64_t digest() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
      for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
      }
    };
    for (const auto& [k, v] : kv_) {
      mix(k);
      mix("=");
      mix(v);
      mix("\n");
    }
    return h;
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  static std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }
  static double parse_double(const std::string& key, const std::string& tok) {
    try {
      std::size_t pos = 0;
      double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw config_error("config field " + key + ": not a number: " + tok);
    }
  }
  static void flatten(const nlohmann::json& j, const std::string& prefix,
                      std::map<std::string, std::string>& out) {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it)
        flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
      return;
    }
    if (j.is_array()) {
      std::string acc;
      for (const auto& e : j) {
        if (!acc.empty()) acc += " ";
        if (e.is_number()) {
          char buf[40];
          std::snprintf(buf, sizeof buf, "%.17g", e.get<double>());
          acc += buf;
        } else {
          acc += e.get<std::string>();
        }
      }
      out[prefix] = acc;
      return;
    }
    if (j.is_number()) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      out[prefix] = buf;
      return;
    }
    if (j.is_boolean()) {
      out[prefix] = j.get<bool>() ? "true" : "false";
      return;
    }
    out[prefix] = j.is_null() ? "" : j.get<std::string>();
  }

  std::map<std::string, std::string> kv_;
};

}  // namespace zoll
