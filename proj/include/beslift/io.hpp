#pragma once

// File formats. BSVG is the bit-exact grid container:
//   bytes 0-3   magic "BSVG" (42 53 56 47)
//   bytes 4-5   u16 little-endian version = 1
//   byte  6     u8 dim
//   byte  7     u8 level
//   byte  8     u8 domain (0 = torus, 1 = cube)
//   byte  9     u8 dtype  (0 = real, 1 = complex)
//   bytes 10-11 reserved zero
//   payload     IEEE-754 binary64 little-endian, complex interleaved (re, im),
//               lexicographic order with the last coordinate fastest.
// CSV and JSON emitters print doubles with 17 significant digits.

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "beslift/besov.hpp"
#include "beslift/counterexamples.hpp"
#include "beslift/grid.hpp"
#include "beslift/jacobian.hpp"
#include "beslift/lifting.hpp"

namespace beslift {

inline constexpr std::uint16_t kBsvgVersion = 1;

namespace detail {

inline void put_u16_le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

inline void put_f64_le(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline double get_f64_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string bsvg_encode(const GridFunction& f, bool force_complex = false) {
  f.validate();
  const bool complex_payload = force_complex || !f.is_real();
  std::string out;
  out.reserve(12 + f.values.size() * (complex_payload ? 16 : 8));
  out += "BSVG";
  detail::put_u16_le(out, kBsvgVersion);
  out.push_back(static_cast<char>(f.grid.dim));
  out.push_back(static_cast<char>(f.grid.level));
  out.push_back(static_cast<char>(f.grid.domain == Domain::Torus ? 0 : 1));
  out.push_back(static_cast<char>(complex_payload ? 1 : 0));
  out.push_back(0);
  out.push_back(0);
  for (const auto& v : f.values) {
    detail::put_f64_le(out, v.real());
    if (complex_payload) detail::put_f64_le(out, v.imag());
  }
  return out;
}

inline GridFunction bsvg_decode(const std::string& bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "BSVG") != 0)
    throw BadFileFormat("missing BSVG magic");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint16_t version = static_cast<std::uint16_t>(p[4] | (p[5] << 8));
  if (version != kBsvgVersion)
    throw BadFileFormat("unsupported BSVG version " + std::to_string(version));
  const int dim = p[6], level = p[7];
  if (p[8] > 1) throw BadFileFormat("bad domain byte");
  if (p[9] > 1) throw BadFileFormat("bad dtype byte");
  const Domain domain = p[8] == 0 ? Domain::Torus : Domain::Cube;
  const bool complex_payload = p[9] == 1;
  const DyadicGrid grid = make_grid(dim, level, domain);
  const std::size_t n = grid.cell_count();
  const std::size_t expect = 12 + n * (complex_payload ? 16 : 8);
  if (bytes.size() != expect)
    throw BadFileFormat("payload size mismatch: got " + std::to_string(bytes.size()) +
                        ", expected " + std::to_string(expect));
  GridFunction f = GridFunction::zeros(grid);
  const unsigned char* q = p + 12;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = detail::get_f64_le(q);
    q += 8;
    double im = 0.0;
    if (complex_payload) {
      im = detail::get_f64_le(q);
      q += 8;
    }
    f.values[i] = complexd{re, im};
  }
  f.validate();
  return f;
}

inline void write_bsvg(const std::string& path, const GridFunction& f,
                       bool force_complex = false) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  const std::string bytes = bsvg_encode(f, force_complex);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error("short write to " + path);
}

inline GridFunction read_bsvg(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return bsvg_decode(ss.str());
}

// --------------------------------------------------------------------------
// reports

inline std::string q_to_string(const BesovParams& bp) {
  return bp.q_inf ? "inf" : detail::fmt17(bp.q);
}

inline std::string norm_report_csv(const NormReport& rep) {
  std::string out = "j,term,method,s,p,q\n";
  for (const auto& [j, term] : rep.levels) {
    out += std::to_string(j) + "," + detail::fmt17(term) + "," + to_string(rep.method) +
           "," + detail::fmt17(rep.params.s) + "," + detail::fmt17(rep.params.p) + "," +
           q_to_string(rep.params) + "\n";
  }
  return out;
}

inline nlohmann::ordered_json besov_params_json(const BesovParams& bp) {
  nlohmann::ordered_json j;
  j["s"] = bp.s;
  j["p"] = bp.p;
  if (bp.q_inf)
    j["q"] = "inf";
  else
    j["q"] = bp.q;
  j["dim"] = bp.dim;
  return j;
}

inline nlohmann::ordered_json norm_report_json(const NormReport& rep) {
  nlohmann::ordered_json j;
  j["method"] = to_string(rep.method);
  j["s"] = rep.params.s;
  j["p"] = rep.params.p;
  if (rep.params.q_inf)
    j["q"] = "inf";
  else
    j["q"] = rep.params.q;
  j["total"] = rep.total;
  j["in_validity_range"] = rep.in_validity_range;
  auto levels = nlohmann::ordered_json::array();
  for (const auto& [lvl, term] : rep.levels)
    levels.push_back({{"j", lvl}, {"term", term}});
  j["levels"] = std::move(levels);
  return j;
}

inline nlohmann::ordered_json lift_result_json(const LiftResult& res, const char* method) {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["residual"] = res.residual;
  auto w = nlohmann::ordered_json::array();
  for (int k = 0; k < res.phase.grid.dim; ++k) w.push_back(res.axis_windings[k]);
  j["axis_windings"] = std::move(w);
  if (res.norm_ratio)
    j["norm_ratio"] = *res.norm_ratio;
  else
    j["norm_ratio"] = nullptr;
  j["increments"] = res.level_increments;
  if (!res.min_modulus.empty()) j["min_modulus"] = res.min_modulus;
  return j;
}

inline nlohmann::ordered_json obstruction_json(const ObstructionWitness& w) {
  nlohmann::ordered_json j;
  j["winding"] = w.winding;
  j["loop"] = w.loop;
  return j;
}

inline std::string winding_field_csv(const WindingField& wf) {
  std::string out = "pair";
  for (int k = 0; k < wf.grid.dim; ++k) out += ",i" + std::to_string(k);
  out += ",winding\n";
  for (std::size_t pi = 0; pi < wf.pairs.size(); ++pi) {
    const std::string pair_name =
        std::to_string(wf.pairs[pi].first) + std::to_string(wf.pairs[pi].second);
    for (std::size_t i = 0; i < wf.windings[pi].size(); ++i) {
      const auto c = wf.grid.coords(i);
      out += pair_name;
      for (int k = 0; k < wf.grid.dim; ++k) out += "," + std::to_string(c[k]);
      out += "," + std::to_string(wf.windings[pi][i]) + "\n";
    }
  }
  return out;
}

inline nlohmann::ordered_json pairing_json(const JacobianPairing& p) {
  nlohmann::ordered_json j;
  j["direct"] = p.direct;
  j["singular"] = p.singular;
  return j;
}

inline std::string scan_csv(const std::vector<ScanEntry>& entries) {
  std::string out = "row,J,running_sup\n";
  for (const auto& e : entries)
    out += std::to_string(e.row) + "," + std::to_string(e.level) + "," +
           detail::fmt17(e.running_sup) + "\n";
  return out;
}

inline nlohmann::ordered_json nonrestriction_spec_json(const NonrestrictionSpec& spec) {
  nlohmann::ordered_json j;
  j["params"] = besov_params_json(spec.params);
  j["j0"] = spec.j0;
  j["level_last"] = spec.level_last;
  j["divergent"] = spec.divergent;
  auto levels = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < spec.intervals.size(); ++i) {
    const auto& L = spec.intervals[i];
    levels.push_back({{"j", L.j},
                      {"s", L.s},
                      {"t", L.t},
                      {"degenerate", L.degenerate},
                      {"mu", spec.mu[i]}});
  }
  j["levels"] = std::move(levels);
  return j;
}

inline NonrestrictionSpec nonrestriction_spec_from_json(const nlohmann::json& j) {
  BesovParams bp;
  bp.s = j.at("params").at("s").get<double>();
  bp.p = j.at("params").at("p").get<double>();
  if (j.at("params").at("q").is_string()) {
    bp.q_inf = true;
  } else {
    bp.q = j.at("params").at("q").get<double>();
  }
  bp.dim = j.at("params").at("dim").get<int>();
  const int j0 = j.at("j0").get<int>();
  const int last = j.at("level_last").get<int>();
  const bool divergent = j.at("divergent").get<bool>();
  auto spec = divergent ? make_nonrestriction_spec(bp, j0, last)
                        : make_contrast_spec(bp, j0, last);
  // round-trip sanity: the stored levels must match the rebuilt ones
  const auto& levels = j.at("levels");
  if (levels.size() != spec.intervals.size())
    throw BadFileFormat("non-restriction level table size mismatch");
  for (std::size_t i = 0; i < spec.intervals.size(); ++i) {
    if (levels[i].at("s").get<long long>() != spec.intervals[i].s ||
        levels[i].at("t").get<long long>() != spec.intervals[i].t)
      throw BadFileFormat("non-restriction level table mismatch");
  }
  return spec;
}

}  // namespace beslift
