#include "cshv/config.hpp"

#include <cstdio>
#include <cstdlib>

#include <json.hpp>

namespace cshv {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string format_complex(cx z) {
  std::string out = fmt17(z.real());
  if (!(z.imag() < 0.0)) out += '+';
  out += fmt17(z.imag());
  out += 'i';
  return out;
}

cx parse_complex(const std::string& s) {
  const char* p = s.c_str();
  char* end = nullptr;
  const double first = std::strtod(p, &end);
  if (end == p) throw ConfigInvalid("cannot parse complex number '" + s + "'");
  if (*end == '\0') return cx(first, 0.0);
  if (*end == 'i' && end[1] == '\0') return cx(0.0, first);
  const char* p2 = end;
  const double second = std::strtod(p2, &end);
  if (end == p2 || *end != 'i' || end[1] != '\0')
    throw ConfigInvalid("cannot parse complex number '" + s +
                        "' (expected \"x+yi\")");
  return cx(first, second);
}

void RunConfig::validate() const {
  if (positions.size() != mults.size())
    throw ConfigInvalid("positions and multiplicities differ in length");
  for (int m : mults)
    if (m < 0) throw ConfigInvalid("multiplicities must be >= 0");
  for (int idx : concentration)
    if (idx < 0 || idx >= int(positions.size()))
      throw ConfigInvalid("concentration index " + std::to_string(idx) +
                          " out of range");
  if (grid < 4 || (grid & (grid - 1)) != 0)
    throw ConfigInvalid("grid must be a power of two >= 4");
  if (!(tol > 0.0)) throw ConfigInvalid("tolerance must be positive");
  if (rho < 0.0) throw ConfigInvalid("rho must be >= 0");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ConfigInvalid("gamma must lie in (0,1)");
  if (eps_range.count < 1 || delta_range.count < 1)
    throw ConfigInvalid("range counts must be >= 1");
  if (!(std::imag(omega2 / omega1) > 0.0))
    throw ConfigInvalid("torus periods must satisfy Im(w2/w1) > 0");
}

VortexConfig RunConfig::vortex_config() const {
  validate();
  VortexConfig cfg;
  cfg.torus = Torus(omega1, omega2);
  for (std::size_t j = 0; j < positions.size(); ++j)
    if (mults[j] > 0) {
      cfg.points.push_back(positions[j]);
      cfg.mult.push_back(mults[j]);
    }
  for (int idx : concentration)
    cfg.xi.push_back(positions[std::size_t(idx)]);
  cfg.validate();
  return cfg;
}

std::string emit_config(const RunConfig& c) {
  ordered_json j;
  j["torus"] = {{"omega1", format_complex(c.omega1)},
                {"omega2", format_complex(c.omega2)}};
  j["points"] = ordered_json::array();
  for (std::size_t k = 0; k < c.positions.size(); ++k)
    j["points"].push_back({{"position", format_complex(c.positions[k])},
                           {"multiplicity", c.mults[k]}});
  j["concentration"] = c.concentration;
  j["grid"] = c.grid;
  j["tol"] = c.tol;
  j["rho"] = c.rho;
  j["gamma"] = c.gamma;
  j["eps_range"] = {{"min", c.eps_range.min},
                    {"max", c.eps_range.max},
                    {"count", c.eps_range.count}};
  j["delta_range"] = {{"min", c.delta_range.min},
                      {"max", c.delta_range.max},
                      {"count", c.delta_range.count}};
  j["out"] = c.out_dir;
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

RunConfig parse_config(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    if (j.contains("torus")) {
      c.omega1 = parse_complex(j["torus"].value("omega1", "1+0i"));
      c.omega2 = parse_complex(j["torus"].value("omega2", "0+1i"));
    }
    if (j.contains("points"))
      for (const auto& p : j["points"]) {
        c.positions.push_back(
            parse_complex(p.at("position").get<std::string>()));
        c.mults.push_back(p.at("multiplicity").get<int>());
      }
    if (j.contains("concentration"))
      c.concentration = j["concentration"].get<std::vector<int>>();
    c.grid = j.value("grid", c.grid);
    c.tol = j.value("tol", c.tol);
    c.rho = j.value("rho", c.rho);
    c.gamma = j.value("gamma", c.gamma);
    if (j.contains("eps_range")) {
      c.eps_range.min = j["eps_range"].value("min", 0.0);
      c.eps_range.max = j["eps_range"].value("max", 0.0);
      c.eps_range.count = j["eps_range"].value("count", 6);
    }
    if (j.contains("delta_range")) {
      c.delta_range.min = j["delta_range"].value("min", 1e-3);
      c.delta_range.max = j["delta_range"].value("max", 1e-1);
      c.delta_range.count = j["delta_range"].value("count", 9);
    }
    c.out_dir = j.value("out", c.out_dir);
    c.seed = j.value("seed", c.seed);
  } catch (const ConfigInvalid&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigInvalid(std::string("malformed config field: ") + e.what());
  }
  c.validate();
  return c;
}

std::uint64_t config_hash(const RunConfig& c) {
  const std::string text = emit_config(c);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace cshv
