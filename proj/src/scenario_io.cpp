#include "hjump/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hjump/error.hpp"
#include "hjump/verify.hpp"

namespace hjump {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "required field missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "expected a finite number");
  return d;
}

double number_field(const json& obj, const std::string& path, const char* key) {
  return as_number(require(obj, path, key), path + "." + key);
}

double number_field_or(const json& obj, const std::string& path, const char* key, double dflt) {
  if (!obj.contains(key)) return dflt;
  return as_number(obj.at(key), path + "." + key);
}

/// A domain end: a number, or "-inf"/"inf" (also null for the matching side).
double domain_end(const json& obj, const std::string& path, const char* key, double infinity) {
  const json& v = require(obj, path, key);
  const std::string p = path + "." + key;
  if (v.is_null()) return infinity;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if ((infinity < 0 && s == "-inf") || (infinity > 0 && (s == "inf" || s == "+inf")))
      return infinity;
    fail(p, "expected a number or \"" + std::string(infinity < 0 ? "-inf" : "inf") + "\"");
  }
  return as_number(v, p);
}

HamiltonianSpec parse_hamiltonian(const json& j, const std::string& path) {
  const json& kind_v = require(j, path, "kind");
  if (!kind_v.is_string()) fail(path + ".kind", "expected a string");
  const auto kind = kind_v.get<std::string>();
  if (kind == "sin") return HamiltonianSpec::sine();
  if (kind == "tanh") return HamiltonianSpec::tanh();
  if (kind == "clamp") return HamiltonianSpec::clamp();
  if (kind == "constant") return HamiltonianSpec::constant(number_field(j, path, "c"));
  if (kind == "table") {
    const json& samples_v = require(j, path, "samples");
    if (!samples_v.is_array()) fail(path + ".samples", "expected an array of [xi, H] pairs");
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i < samples_v.size(); ++i) {
      const std::string p = path + ".samples[" + std::to_string(i) + "]";
      const json& s = samples_v[i];
      if (!s.is_array() || s.size() != 2) fail(p, "expected [xi, H]");
      samples.emplace_back(as_number(s[0], p + "[0]"), as_number(s[1], p + "[1]"));
    }
    const json& tails_v = require(j, path, "tails");
    const std::string tp = path + ".tails";
    TailDescriptors tails{number_field(tails_v, tp, "limsup_plus"),
                          number_field(tails_v, tp, "liminf_plus"),
                          number_field(tails_v, tp, "limsup_minus"),
                          number_field(tails_v, tp, "liminf_minus")};
    const double lip = number_field(j, path, "lip");
    try {
      return HamiltonianSpec::table(samples, tails, lip);
    } catch (const InputError& e) {
      fail(path, e.what());
    }
  }
  fail(path + ".kind", "unknown Hamiltonian kind '" + kind +
                           "' (expected sin, tanh, clamp, constant or table)");
}

Segment parse_segment(const json& j, const std::string& path) {
  const json& type_v = require(j, path, "type");
  if (!type_v.is_string()) fail(path + ".type", "expected a string");
  const auto type = type_v.get<std::string>();
  Segment seg;
  if (type == "constant") {
    seg.form = ConstantSegment{number_field(j, path, "value")};
  } else if (type == "affine") {
    seg.form = AffineSegment{number_field(j, path, "slope"), number_field_or(j, path, "intercept", 0.0)};
  } else if (type == "sine") {
    seg.form = SineSegment{number_field_or(j, path, "amplitude", 1.0),
                           number_field_or(j, path, "frequency", 1.0),
                           number_field_or(j, path, "phase", 0.0),
                           number_field_or(j, path, "offset", 0.0)};
  } else if (type == "sampled") {
    const json& vals = require(j, path, "values");
    if (!vals.is_array()) fail(path + ".values", "expected an array of numbers");
    SampledSegment s;
    for (std::size_t i = 0; i < vals.size(); ++i)
      s.values.push_back(as_number(vals[i], path + ".values[" + std::to_string(i) + "]"));
    s.modulus = number_field(j, path, "modulus");
    seg.form = std::move(s);
  } else {
    fail(path + ".type", "unknown segment type '" + type +
                             "' (expected constant, affine, sine or sampled)");
  }
  if (j.contains("bumps")) {
    const json& bumps = j.at("bumps");
    if (!bumps.is_array()) fail(path + ".bumps", "expected an array");
    for (std::size_t i = 0; i < bumps.size(); ++i) {
      const std::string p = path + ".bumps[" + std::to_string(i) + "]";
      seg.bumps.push_back({number_field(bumps[i], p, "center"),
                           number_field(bumps[i], p, "half_width"),
                           number_field(bumps[i], p, "amplitude")});
    }
  }
  return seg;
}

BCTag parse_bc(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) return BCTag::free();
  const json& v = obj.at(key);
  const std::string p = path + "." + key;
  if (!v.is_string()) fail(p, "expected a string");
  const auto s = v.get<std::string>();
  if (s == "free" || s == "none") return BCTag::free();
  if (s == "singular_plus") return BCTag::singular_plus();
  if (s == "singular_minus") return BCTag::singular_minus();
  fail(p, "unknown boundary tag '" + s + "' (expected free, singular_plus or singular_minus)");
}

json segment_to_json(const Segment& seg) {
  json j;
  if (const auto* c = std::get_if<ConstantSegment>(&seg.form)) {
    j = {{"type", "constant"}, {"value", c->value}};
  } else if (const auto* a = std::get_if<AffineSegment>(&seg.form)) {
    j = {{"type", "affine"}, {"slope", a->slope}, {"intercept", a->intercept}};
  } else if (const auto* s = std::get_if<SineSegment>(&seg.form)) {
    j = {{"type", "sine"},   {"amplitude", s->amplitude}, {"frequency", s->frequency},
         {"phase", s->phase}, {"offset", s->offset}};
  } else if (const auto* sm = std::get_if<SampledSegment>(&seg.form)) {
    j = {{"type", "sampled"}, {"values", sm->values}, {"modulus", sm->modulus}};
  }
  if (!seg.bumps.empty()) {
    json bumps = json::array();
    for (const auto& b : seg.bumps)
      bumps.push_back({{"center", b.center}, {"half_width", b.half_width}, {"amplitude", b.amplitude}});
    j["bumps"] = bumps;
  }
  return j;
}

json end_to_json(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return v;
}

json hamiltonian_to_json(const HamiltonianSpec& H) {
  json j{{"kind", H.name()}};
  if (const auto* c = std::get_if<ConstantH>(&H.kind())) j["c"] = c->c;
  if (const auto* t = std::get_if<TableH>(&H.kind())) {
    json samples = json::array();
    for (std::size_t i = 0; i < t->values.size(); ++i)
      samples.push_back({t->xi_min + t->spacing * static_cast<double>(i), t->values[i]});
    j["samples"] = samples;
    j["tails"] = {{"limsup_plus", t->tails.limsup_plus},
                  {"liminf_plus", t->tails.liminf_plus},
                  {"limsup_minus", t->tails.limsup_minus},
                  {"liminf_minus", t->tails.liminf_minus}};
    j["lip"] = t->lip;
  }
  return j;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("(root)", "expected an object");

  Scenario s;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) fail("name", "expected a string");
    s.name = doc.at("name").get<std::string>();
  }
  const json& domain = require(doc, "(root)", "domain");
  s.a = domain_end(domain, "domain", "a", -std::numeric_limits<double>::infinity());
  s.b = domain_end(domain, "domain", "b", std::numeric_limits<double>::infinity());
  if (domain.contains("window")) {
    const json& w = domain.at("window");
    if (!w.is_array() || w.size() != 2) fail("domain.window", "expected [lo, hi]");
    s.window = std::pair{as_number(w[0], "domain.window[0]"), as_number(w[1], "domain.window[1]")};
  }
  if (!(s.a < s.b)) fail("domain", "need a < b");
  s.T = number_field(doc, "(root)", "T");
  if (!(s.T > 0.0)) fail("T", "must be positive");
  s.H = parse_hamiltonian(require(doc, "(root)", "hamiltonian"), "hamiltonian");

  const json& init = require(doc, "(root)", "initial_data");
  std::vector<double> breakpoints;
  if (init.contains("breakpoints")) {
    const json& bp = init.at("breakpoints");
    if (!bp.is_array()) fail("initial_data.breakpoints", "expected an array");
    for (std::size_t i = 0; i < bp.size(); ++i)
      breakpoints.push_back(as_number(bp[i], "initial_data.breakpoints[" + std::to_string(i) + "]"));
  }
  const json& segs = require(init, "initial_data", "segments");
  if (!segs.is_array()) fail("initial_data.segments", "expected an array");
  std::vector<Segment> segments;
  for (std::size_t i = 0; i < segs.size(); ++i)
    segments.push_back(parse_segment(segs[i], "initial_data.segments[" + std::to_string(i) + "]"));
  try {
    s.u0 = PiecewiseFn(s.a, s.b, breakpoints, std::move(segments));
  } catch (const InputError& e) {
    fail("initial_data", e.what());
  }
  if (init.contains("traces")) {
    const json& tr = init.at("traces");
    if (!tr.is_array() || tr.size() != breakpoints.size())
      fail("initial_data.traces", "expected one [left, right] pair per breakpoint");
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const std::string p = "initial_data.traces[" + std::to_string(i) + "]";
      if (!tr[i].is_array() || tr[i].size() != 2) fail(p, "expected [left, right]");
      const double l = as_number(tr[i][0], p + "[0]");
      const double r = as_number(tr[i][1], p + "[1]");
      const auto [el, er] = s.u0.traces(i);
      auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * (1.0 + std::abs(y)); };
      if (!close(l, el) || !close(r, er)) {
        std::ostringstream msg;
        msg << "declared traces (" << l << ", " << r << ") do not match the segment end values ("
            << el << ", " << er << ")";
        fail(p, msg.str());
      }
    }
  }

  if (doc.contains("boundary")) {
    const json& bc = doc.at("boundary");
    if (!bc.is_object()) fail("boundary", "expected an object");
    s.left_bc = parse_bc(bc, "boundary", "left");
    s.right_bc = parse_bc(bc, "boundary", "right");
  }

  if (doc.contains("numerics")) {
    const json& nm = doc.at("numerics");
    if (!nm.is_object()) fail("numerics", "expected an object");
    s.numerics.h = number_field_or(nm, "numerics", "h", s.numerics.h);
    s.numerics.cfl = number_field_or(nm, "numerics", "cfl", s.numerics.cfl);
    s.numerics.record_every = number_field_or(nm, "numerics", "record_every", s.numerics.record_every);
    if (nm.contains("alpha") && !nm.at("alpha").is_null())
      s.numerics.alpha = as_number(nm.at("alpha"), "numerics.alpha");
    if (nm.contains("tolerances")) {
      const json& tol = nm.at("tolerances");
      if (!tol.is_object()) fail("numerics.tolerances", "expected an object");
      if (tol.contains("tol_J") && !tol.at("tol_J").is_null())
        s.numerics.tol_J = as_number(tol.at("tol_J"), "numerics.tolerances.tol_J");
    }
  }
  if (!(s.numerics.h > 0.0)) fail("numerics.h", "must be positive");
  if (!(s.numerics.cfl > 0.0 && s.numerics.cfl <= 1.0)) fail("numerics.cfl", "must lie in (0, 1]");
  if (!(s.numerics.record_every > 0.0)) fail("numerics.record_every", "must be positive");

  computational_geometry(s);  // grid alignment and boundary checks
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["domain"] = {{"a", end_to_json(s.a)}, {"b", end_to_json(s.b)}};
  if (s.window) j["domain"]["window"] = {s.window->first, s.window->second};
  j["T"] = s.T;
  j["hamiltonian"] = hamiltonian_to_json(s.H);
  json segs = json::array();
  for (const auto& seg : s.u0.segments()) segs.push_back(segment_to_json(seg));
  json traces = json::array();
  for (std::size_t i = 0; i < s.u0.breakpoints().size(); ++i) {
    const auto [l, r] = s.u0.traces(i);
    traces.push_back({l, r});
  }
  j["initial_data"] = {{"breakpoints", s.u0.breakpoints()}, {"segments", segs}, {"traces", traces}};
  j["boundary"] = {{"left", to_string(s.left_bc.kind)}, {"right", to_string(s.right_bc.kind)}};
  json nm{{"h", s.numerics.h}, {"cfl", s.numerics.cfl}, {"record_every", s.numerics.record_every}};
  if (s.numerics.alpha) nm["alpha"] = *s.numerics.alpha;
  if (s.numerics.tol_J) nm["tolerances"] = {{"tol_J", *s.numerics.tol_J}};
  j["numerics"] = nm;
  return j;
}

std::string scenario_fingerprint(const Scenario& s) {
  const std::string text = scenario_to_json(s).dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_snapshots_csv(const Solution& sol, std::ostream& out) {
  out << "t,x,u\n";
  for (std::size_t k = 0; k < sol.snapshots.size(); ++k) {
    const auto f = sol.field(k);
    const std::string t = format_double(sol.snapshots[k].t);
    for (std::size_t i = 0; i < sol.geometry.n_nodes; ++i) {
      const std::string x = format_double(sol.geometry.x(i));
      out << t << ',' << x << ',' << format_double(f.minus[i]) << '\n';
      if (f.plus[i] != f.minus[i]) out << t << ',' << x << ',' << format_double(f.plus[i]) << '\n';
    }
  }
}

void write_interval_traces_csv(const Solution& sol, std::size_t k, std::ostream& out) {
  out << "t,left_trace,right_trace\n";
  for (const auto& p : sol.interval_traces.at(k))
    out << format_double(p.t) << ',' << format_double(p.left) << ',' << format_double(p.right) << '\n';
}

void write_jump_traces_csv(const Solution& sol, std::size_t j, std::ostream& out) {
  out << "t,left_trace,right_trace,J\n";
  for (const auto& p : sol.jumps.at(j).series)
    out << format_double(p.t) << ',' << format_double(p.left) << ',' << format_double(p.right)
        << ',' << format_double(p.J) << '\n';
}

json report_to_json(const CheckReport& r) {
  auto num = [](double v) -> json {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
  };
  json measured = json::object();
  for (const auto& [k, v] : r.measured) measured[k] = num(v);
  json tolerance = json::object();
  for (const auto& [k, v] : r.tolerance) tolerance[k] = num(v);
  return {{"check", r.name},   {"pass", r.pass},           {"measured", measured},
          {"tolerance", tolerance}, {"fingerprint", r.fingerprint}, {"note", r.note}};
}

json solution_report(const Solution& sol, const Scenario& s) {
  json jumps = json::array();
  for (const auto& rec : sol.jumps) {
    json j{{"x_j", rec.x},
           {"sign", to_string(rec.sign)},
           {"J0", rec.J0},
           {"t_lower", rec.t_lower},
           {"tau", rec.tau ? json(*rec.tau) : json(nullptr)},
           {"decay_bound", rec.decay_rate_bound},
           {"max_decay_violation", jump_decay_violation(rec)},
           {"merged_at", rec.merged_at ? json(*rec.merged_at) : json(nullptr)}};
    jumps.push_back(j);
  }
  json merges = json::array();
  for (const auto& m : sol.merges)
    merges.push_back({{"t", m.t},
                      {"jump", m.jump},
                      {"x", m.x},
                      {"left_trace", m.left_trace},
                      {"right_trace", m.right_trace},
                      {"merged_value", m.merged_value}});
  const auto& b = sol.bounds;
  return json{{"scenario", s.name},
              {"fingerprint", scenario_fingerprint(s)},
              {"bounds", {{"K", b.K}, {"k", b.k}, {"A_plus", b.A_plus}, {"A_minus", b.A_minus}, {"L", b.L}}},
              {"grid", {{"a", sol.geometry.a}, {"b", sol.geometry.b()}, {"h", sol.geometry.h},
                        {"nodes", sol.geometry.n_nodes}}},
              {"alpha", sol.alpha},
              {"dt", sol.dt},
              {"tol_J", sol.tol_J},
              {"merge_tol", sol.merge_tol},
              {"jumps", jumps},
              {"merges", merges},
              {"config", scenario_to_json(s)}};
}

}  // namespace hjump
