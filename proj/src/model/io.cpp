#include "aircomp/io.hpp"

#include <charconv>
#include <fstream>

#include "aircomp/errors.hpp"

namespace aircomp {
namespace {

double number_field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing field '" + key + "'");
  if (!it->is_number()) throw ValidationError(where + ": field '" + key + "' is not a number");
  return it->get<double>();
}

}  // namespace

json to_json(const ProblemInstance& inst) {
  json devices = json::array();
  for (const auto& d : inst.devices) {
    devices.push_back({{"h", d.h}, {"b_max", d.b_max}, {"c", d.c}, {"D", d.D}});
  }
  return {{"devices", devices}, {"S_T", inst.S_T}, {"sigma2", inst.sigma2}};
}

ProblemInstance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("instance: expected a JSON object");
  const auto devs = doc.find("devices");
  if (devs == doc.end() || !devs->is_array()) {
    throw ValidationError("instance: 'devices' must be an array");
  }
  ProblemInstance inst;
  for (std::size_t k = 0; k < devs->size(); ++k) {
    const json& d = (*devs)[k];
    const std::string where = "device " + std::to_string(k);
    if (!d.is_object()) throw ValidationError(where + ": expected an object");
    inst.devices.push_back({number_field(d, "h", where), number_field(d, "b_max", where),
                            number_field(d, "c", where), number_field(d, "D", where)});
  }
  inst.S_T = number_field(doc, "S_T", "instance");
  inst.sigma2 = number_field(doc, "sigma2", "instance");
  return inst;
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return instance_from_json(doc);
}

void save_instance(const std::filesystem::path& path, const ProblemInstance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(inst).dump(2) << '\n';
}

json to_json(const Allocation& alloc) {
  return {{"a", alloc.a}, {"b", alloc.b}, {"S", alloc.S}, {"mse", alloc.mse}};
}

json to_json(double a, const LowerSolution& sol, const std::vector<double>& S) {
  json out{{"a", a}, {"b", sol.b}, {"beta", sol.beta.beta}, {"S", S}, {"mse", sol.E},
           {"branch", std::string(to_string(sol.branch))}};
  out["lambda_star"] = sol.lambda_star ? json(*sol.lambda_star) : json(nullptr);
  return out;
}

json to_json(const GlobalSolution& sol) {
  return {{"a", sol.a_star},     {"b", sol.lower.b},
          {"beta", sol.lower.beta.beta}, {"S", sol.S},
          {"mse", sol.mse},      {"provenance", sol.provenance},
          {"fallback", sol.fallback}};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace aircomp
