#pragma once

// IFS input documents and JSON report schemas.
//
// Input:
//   { "maps": [ {"alpha": N, "beta": N, "tx": N, "ty": N}, ... ],
//     "weights": [N, ...] }                      // optional
// where N is "p/q", a decimal string such as "0.23" (read exactly), or a bare
// JSON number (also read exactly from its source text).
//
// Rationals in reports are always rendered as "p/q" strings.

#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affdim/dimensions.hpp"
#include "affdim/error.hpp"
#include "affdim/ifs.hpp"
#include "affdim/rational.hpp"
#include "affdim/separation.hpp"
#include "affdim/subsystem.hpp"
#include "json.hpp"

namespace affdim {

using Json = nlohmann::ordered_json;

/// Input error carrying the 1-based line it refers to (0 if unknown).
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct IfsDocument {
  DiagonalIFS ifs;
  std::optional<std::vector<Rational>> weights;
};

namespace detail {

struct ScalarToken {
  std::size_t line;
  std::string text;
};

/// Every scalar token (keys included) in document order, with its line.
inline std::vector<ScalarToken> scan_scalars(std::string_view s) {
  std::vector<ScalarToken> out;
  std::size_t line = 1;
  for (std::size_t i = 0; i < s.size();) {
    const char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == '"') {
      const std::size_t start = i++;
      while (i < s.size() && s[i] != '"') i += (s[i] == '\\') ? 2 : 1;
      ++i;
      out.push_back({line, std::string(s.substr(start, i - start))});
    } else if (c == '-' || std::isdigit(static_cast<unsigned char>(c)) || std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '-' || s[i] == '+' ||
                              s[i] == '.')) {
        ++i;
      }
      out.push_back({line, std::string(s.substr(start, i - start))});
    } else {
      ++i;
    }
  }
  return out;
}

/// JSON pointer -> scalar token, by walking the ordered DOM in document order.
class TokenIndex {
 public:
  TokenIndex(const Json& root, std::vector<ScalarToken> tokens) : tokens_(std::move(tokens)) {
    walk(root, "");
    if (next_ != tokens_.size()) by_pointer_.clear();  // duplicate keys etc.: give up on lines
  }

  std::size_t line(const std::string& pointer) const {
    auto it = by_pointer_.find(pointer);
    return it == by_pointer_.end() ? 0 : tokens_[it->second].line;
  }
  std::optional<std::string> raw(const std::string& pointer) const {
    auto it = by_pointer_.find(pointer);
    if (it == by_pointer_.end()) return std::nullopt;
    return tokens_[it->second].text;
  }

 private:
  void walk(const Json& j, const std::string& ptr) {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string child = ptr + "/" + it.key();
        by_pointer_[child + "#key"] = next_++;
        walk(it.value(), child);
      }
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) walk(j[i], ptr + "/" + std::to_string(i));
    } else {
      by_pointer_[ptr] = next_++;
    }
  }

  std::vector<ScalarToken> tokens_;
  std::map<std::string, std::size_t> by_pointer_;
  std::size_t next_ = 0;
};

inline std::size_t line_of_offset(std::string_view s, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < s.size(); ++i) line += s[i] == '\n';
  return line;
}

inline Rational read_number(const Json& j, const TokenIndex& idx, const std::string& ptr) {
  const std::size_t line = idx.line(ptr);
  try {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number()) {
      if (auto raw = idx.raw(ptr)) return Rational::parse(*raw);
      if (j.is_number_integer()) return Rational(j.get<long>());
      return Rational::from_double(j.get<double>());
    }
  } catch (const ValidationError& e) {
    throw ParseError(line, ptr + ": " + e.what());
  }
  throw ParseError(line, ptr + ": expected a number or a \"p/q\" / decimal string");
}

}  // namespace detail

inline IfsDocument parse_ifs_document(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), std::string("malformed JSON: ") + e.what());
  }
  const detail::TokenIndex idx(root, detail::scan_scalars(text));
  if (!root.is_object()) throw ParseError(1, "document must be a JSON object");
  if (!root.contains("maps") || !root["maps"].is_array()) {
    throw ParseError(idx.line("/maps#key"), "\"maps\" must be an array");
  }
  const Json& maps = root["maps"];
  if (maps.empty()) throw ParseError(idx.line("/maps#key"), "\"maps\" is empty; an IFS needs at least one map");

  std::vector<DiagonalMap> parsed;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const std::string base = "/maps/" + std::to_string(i);
    const Json& m = maps[i];
    if (!m.is_object()) throw ParseError(idx.line(base), base + ": each map must be an object");
    Rational v[4];
    const char* keys[4] = {"alpha", "beta", "tx", "ty"};
    for (int f = 0; f < 4; ++f) {
      if (!m.contains(keys[f])) {
        std::size_t line = 0;
        for (auto it = m.begin(); it != m.end() && !line; ++it) line = idx.line(base + "/" + it.key() + "#key");
        throw ParseError(line, base + ": missing field \"" + keys[f] + "\"");
      }
      const std::string ptr = base + "/" + keys[f];
      v[f] = detail::read_number(m[keys[f]], idx, ptr);
    }
    for (int f = 0; f < 2; ++f) {
      if (v[f].is_zero() || !(v[f].abs() < Rational(1))) {
        throw ParseError(idx.line(base + "/" + keys[f]),
                         base + "/" + keys[f] + ": contraction must satisfy 0 < |r| < 1, got " + v[f].to_string());
      }
    }
    parsed.push_back(DiagonalMap::make(v[0], v[1], v[2], v[3]));
  }

  IfsDocument doc{DiagonalIFS(std::move(parsed)), std::nullopt};
  if (root.contains("weights")) {
    const Json& w = root["weights"];
    if (!w.is_array()) throw ParseError(idx.line("/weights#key"), "\"weights\" must be an array");
    if (w.size() != maps.size()) {
      throw ParseError(idx.line("/weights#key"), "\"weights\" has " + std::to_string(w.size()) + " entries for " +
                                                     std::to_string(maps.size()) + " maps");
    }
    std::vector<Rational> ws;
    Rational sum = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::string ptr = "/weights/" + std::to_string(i);
      ws.push_back(detail::read_number(w[i], idx, ptr));
      if (ws.back().sign() <= 0) throw ParseError(idx.line(ptr), ptr + ": weights must be positive");
      sum += ws.back();
    }
    if (std::fabs(sum.to_double() - 1.0) > WeightVector::kSumTolerance) {
      throw ParseError(idx.line("/weights#key"), "weights sum to " + sum.to_string() + ", not 1");
    }
    doc.weights = std::move(ws);
  }
  return doc;
}

inline WeightVector to_weight_vector(const std::vector<Rational>& w) {
  std::vector<double> p;
  p.reserve(w.size());
  for (const auto& r : w) p.push_back(r.to_double());
  return WeightVector(std::move(p));
}

// ---- report serialisation -------------------------------------------------

inline Json word_json(const Word& w) {
  Json a = Json::array();
  for (Letter l : w) a.push_back(l);
  return a;
}

inline Word word_from_json(const Json& j) {
  Word w;
  for (const auto& v : j) w.push_back(v.get<Letter>());
  return w;
}

inline Json pair_json(const std::optional<WordPair>& p) {
  if (!p) return nullptr;
  return Json::array({word_json(p->first), word_json(p->second)});
}

inline std::optional<WordPair> pair_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return WordPair{word_from_json(j.at(0)), word_from_json(j.at(1))};
}

inline Axis axis_from_string(const std::string& s) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  throw ValidationError("axis must be x or y, got '" + s + "'");
}

inline CaseTag case_from_string(const std::string& s) {
  for (CaseTag c : {CaseTag::A1, CaseTag::A2, CaseTag::B1, CaseTag::B2, CaseTag::out_of_theorem_scope}) {
    if (s == to_string(c)) return c;
  }
  throw ValidationError("unknown case tag '" + s + "'");
}

inline Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::overlap_found, Verdict::no_overlap_up_to_n, Verdict::separation_healthy}) {
    if (s == to_string(v)) return v;
  }
  throw ValidationError("unknown verdict '" + s + "'");
}

inline Json to_json(const DimensionReport& r) {
  Json axes = Json::array();
  for (Axis a : r.hypotheses.hochman_required) axes.push_back(to_string(a));
  return Json{{"case", to_string(r.case_tag)},
              {"value", r.value},
              {"s_x", r.s_x},
              {"s_y", r.s_y},
              {"t0", r.t0},
              {"axes_swapped", r.axes_swapped},
              {"hypotheses",
               {{"hochman_required", axes},
                {"inequalities_hold", r.hypotheses.inequalities_hold},
                {"checked_depth", r.hypotheses.checked_depth}}}};
}

inline DimensionReport dimension_report_from_json(const Json& j) {
  DimensionReport r;
  r.case_tag = case_from_string(j.at("case").get<std::string>());
  r.value = j.at("value").get<double>();
  r.s_x = j.at("s_x").get<double>();
  r.s_y = j.at("s_y").get<double>();
  r.t0 = j.at("t0").get<double>();
  r.axes_swapped = j.at("axes_swapped").get<bool>();
  const Json& h = j.at("hypotheses");
  for (const auto& a : h.at("hochman_required")) r.hypotheses.hochman_required.push_back(axis_from_string(a.get<std::string>()));
  r.hypotheses.inequalities_hold = h.at("inequalities_hold").get<bool>();
  r.hypotheses.checked_depth = h.at("checked_depth").get<int>();
  return r;
}

inline Json to_json(const SeparationLevel& l) {
  Json j{{"n", l.n}};
  j["delta_min"] = l.delta ? Json(l.delta->to_string()) : Json("Infinity");
  const auto rate = l.rate();
  j["rate"] = rate ? Json(*rate) : Json(nullptr);
  j["witness"] = pair_json(l.witness);
  return j;
}

inline Json to_json(const SeparationReport& r) {
  Json levels = Json::array();
  for (const auto& l : r.per_level) levels.push_back(to_json(l));
  return Json{{"verdict", to_string(r.verdict)},
              {"n_max", r.n_max},
              {"rate_floor", r.rate_floor},
              {"budget_exhausted", r.budget_exhausted},
              {"overlap_witness", pair_json(r.overlap_witness)},
              {"per_level", levels},
              {"note", r.note}};
}

inline SeparationReport separation_report_from_json(const Json& j) {
  SeparationReport r;
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  r.n_max = j.at("n_max").get<std::size_t>();
  r.rate_floor = j.at("rate_floor").get<double>();
  r.budget_exhausted = j.at("budget_exhausted").get<bool>();
  r.overlap_witness = pair_from_json(j.at("overlap_witness"));
  r.note = j.at("note").get<std::string>();
  for (const auto& lj : j.at("per_level")) {
    SeparationLevel l;
    l.n = lj.at("n").get<std::size_t>();
    const auto d = lj.at("delta_min").get<std::string>();
    if (d != "Infinity") l.delta = Rational::parse(d);
    l.witness = pair_from_json(lj.at("witness"));
    r.per_level.push_back(std::move(l));
  }
  return r;
}

inline Json to_json(const HomogeneousSystem& s) {
  Json tr = Json::array();
  for (const auto& t : s.translations) tr.push_back(Json::array({t.x.to_string(), t.y.to_string()}));
  Json words = Json::array();
  for (const auto& w : s.source_words) words.push_back(word_json(w));
  return Json{{"common_alpha", s.common_alpha.to_string()},
              {"common_beta", s.common_beta.to_string()},
              {"k", s.k},
              {"root", s.root},
              {"translations", tr},
              {"source_words", words}};
}

inline HomogeneousSystem homogeneous_system_from_json(const Json& j) {
  HomogeneousSystem s;
  s.common_alpha = Rational::parse(j.at("common_alpha").get<std::string>());
  s.common_beta = Rational::parse(j.at("common_beta").get<std::string>());
  s.k = j.at("k").get<std::size_t>();
  s.root = j.at("root").get<double>();
  for (const auto& t : j.at("translations")) {
    s.translations.push_back({Rational::parse(t.at(0).get<std::string>()), Rational::parse(t.at(1).get<std::string>())});
  }
  for (const auto& w : j.at("source_words")) s.source_words.push_back(word_from_json(w));
  return s;
}

inline Json to_json(const SubsystemResult& r) {
  return Json{{"ssc_certified", r.ssc_certified},
              {"achieved_dimension", r.achieved_dimension},
              {"target_dimension", r.target_dimension},
              {"epsilon", r.epsilon},
              {"iterate_depth_total", r.iterate_depth_total},
              {"target_reached", r.target_reached},
              {"budget_exhausted", r.budget_exhausted},
              {"maps", r.system.size()},
              {"system", to_json(r.system)}};
}

inline SubsystemResult subsystem_result_from_json(const Json& j) {
  SubsystemResult r;
  r.ssc_certified = j.at("ssc_certified").get<bool>();
  r.achieved_dimension = j.at("achieved_dimension").get<double>();
  r.target_dimension = j.at("target_dimension").get<double>();
  r.epsilon = j.at("epsilon").get<double>();
  r.iterate_depth_total = j.at("iterate_depth_total").get<std::size_t>();
  r.target_reached = j.at("target_reached").get<bool>();
  r.budget_exhausted = j.at("budget_exhausted").get<bool>();
  r.system = homogeneous_system_from_json(j.at("system"));
  return r;
}

}  // namespace affdim
