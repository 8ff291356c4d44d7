#include "aswt/spec_io.hpp"

#include <fstream>
#include <sstream>

#include "aswt/error.hpp"
#include "json.hpp"

namespace aswt {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips a # comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (ch == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
    if (ch == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

json key_value_document(const std::string& text) {
  json doc = json::object();
  std::istringstream in(text);
  std::string line, pending_key, pending_value;
  int lineno = 0;
  auto flush = [&] {
    if (pending_key.empty()) return;
    try {
      doc[pending_key] = json::parse(pending_value);
    } catch (const json::parse_error&) {
      // bare words are allowed for the name
      if (pending_key != "name")
        fail(ErrorCode::parse, "bad value for '" + pending_key + "': " + trim(pending_value));
      doc[pending_key] = trim(pending_value);
    }
    pending_key.clear();
    pending_value.clear();
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    auto eq = body.find('=');
    bool continuation = !pending_key.empty() && (eq == std::string::npos || body.front() == ']' ||
                                                 body.front() == '[' || body.front() == '{' ||
                                                 body.front() == ',');
    if (continuation) {
      pending_value += " " + body;
      continue;
    }
    flush();
    if (eq == std::string::npos)
      fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": expected key = value");
    pending_key = trim(body.substr(0, eq));
    pending_value = trim(body.substr(eq + 1));
    if (pending_key.empty()) fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": empty key");
    if (doc.contains(pending_key)) fail(ErrorCode::parse, "duplicate key '" + pending_key + "'");
  }
  flush();
  return doc;
}

unsigned as_unsigned(const json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(ErrorCode::parse, what + " must be a nonnegative integer");
  return j.get<unsigned>();
}

Elem parse_coefficient(const FieldCtx& F, const json& j) {
  if (j.is_number_integer()) return F.from_int(j.get<long long>());
  if (j.is_array()) {
    std::vector<unsigned> digits;
    for (const auto& x : j) {
      if (!x.is_number_integer()) fail(ErrorCode::parse, "coefficient digits must be integers");
      long long v = x.get<long long>() % static_cast<long long>(F.p());
      digits.push_back(static_cast<unsigned>(v < 0 ? v + F.p() : v));
    }
    if (digits.size() > F.k()) fail(ErrorCode::parse, "coefficient has more than k digits");
    return F.from_digits(digits);
  }
  if (j.is_string()) return F.parse(j.get<std::string>());
  fail(ErrorCode::parse, "bad coefficient " + j.dump());
}

}  // namespace

ParsedSpec parse_spec_text(const std::string& text) {
  json doc;
  std::string t = trim(text);
  if (!t.empty() && t.front() == '{') {
    try {
      doc = json::parse(t);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::parse, std::string("spec JSON: ") + e.what());
    }
  } else {
    doc = key_value_document(text);
  }
  if (!doc.is_object()) fail(ErrorCode::parse, "spec must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& k = it.key();
    if (k != "p" && k != "k" && k != "modulus" && k != "name" && k != "terms")
      fail(ErrorCode::parse, "unknown key '" + k + "'");
  }
  if (!doc.contains("p")) fail(ErrorCode::parse, "missing p");
  if (!doc.contains("terms")) fail(ErrorCode::parse, "missing terms");
  const unsigned p = as_unsigned(doc["p"], "p");
  const unsigned k = doc.contains("k") ? as_unsigned(doc["k"], "k") : 1;
  if (!is_supported_prime(p)) fail(ErrorCode::invalid_argument, "unsupported prime p=" + std::to_string(p));

  ParsedSpec out;
  if (doc.contains("modulus")) {
    std::vector<unsigned> mod;
    if (!doc["modulus"].is_array()) fail(ErrorCode::parse, "modulus must be a list");
    for (const auto& x : doc["modulus"]) mod.push_back(as_unsigned(x, "modulus coefficient"));
    out.spec.field = FieldCtx::make(p, k, mod);
  } else {
    out.spec.field = FieldCtx::make(p, k);
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail(ErrorCode::parse, "name must be a string");
    out.spec.name = doc["name"].get<std::string>();
  }
  const json& terms = doc["terms"];
  if (!terms.is_array() || terms.empty()) fail(ErrorCode::parse, "terms must be a nonempty list");
  for (const auto& tj : terms) {
    Term t;
    if (tj.is_array()) {
      if (tj.size() != 3) fail(ErrorCode::parse, "term arrays are [v, c, i]");
      t.v = as_unsigned(tj[0], "v");
      t.c = parse_coefficient(*out.spec.field, tj[1]);
      t.i = as_unsigned(tj[2], "i");
    } else if (tj.is_object()) {
      for (auto it = tj.begin(); it != tj.end(); ++it)
        if (it.key() != "v" && it.key() != "c" && it.key() != "i")
          fail(ErrorCode::parse, "unknown term key '" + it.key() + "'");
      if (!tj.contains("c") || !tj.contains("i")) fail(ErrorCode::parse, "term needs c and i");
      t.v = tj.contains("v") ? as_unsigned(tj["v"], "v") : 0;
      t.c = parse_coefficient(*out.spec.field, tj["c"]);
      t.i = as_unsigned(tj["i"], "i");
    } else {
      fail(ErrorCode::parse, "bad term " + tj.dump());
    }
    if (t.i != 0 && t.i % p == 0)
      out.warnings.push_back("exponent " + std::to_string(t.i) + " is divisible by p; the term is normalized");
    out.spec.terms.push_back(t);
  }
  validate_spec(out.spec);
  return out;
}

ParsedSpec parse_spec_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::io, "cannot read spec file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ParsedSpec out = parse_spec_text(ss.str());
  if (out.spec.name.empty()) out.spec.name = file.stem().string();
  return out;
}

std::string spec_to_json(const TowerSpec& spec) {
  const FieldCtx& F = *spec.field;
  json j;
  j["name"] = spec.name;
  j["p"] = F.p();
  j["k"] = F.k();
  if (F.k() > 1) j["modulus"] = F.modulus();
  json terms = json::array();
  for (const auto& t : spec.terms) {
    json c = F.k() == 1 ? json(t.c) : json(F.digits(t.c));
    terms.push_back(json::array({t.v, c, t.i}));
  }
  j["terms"] = terms;
  return j.dump();
}

}  // namespace aswt
